#include "craterloc/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace craterloc::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 52.0;
constexpr int kTicks = 5;

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo{0.0};
    double hi{1.0};
};

Range padded(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
    if (hi - lo < 1e-12) return {lo - 0.5, hi + 0.5};
    return {lo, hi};
}

class Canvas {
public:
    Canvas(Range x, Range y) : x_(x), y_(y) {}

    [[nodiscard]] double px(double x) const {
        return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight);
    }
    [[nodiscard]] double py(double y) const {
        return kHeight - kBottom - (y - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom);
    }

    void header(std::string_view title) {
        out_ += fmt::format(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n",
            kWidth, kHeight);
        out_ += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
        out_ += fmt::format(
            "<text x=\"{:.1f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
            (kLeft + kWidth - kRight) / 2.0, escape(title));
    }

    void axes(std::string_view x_label, std::string_view y_label) {
        const double x0 = kLeft, x1 = kWidth - kRight;
        const double y0 = kHeight - kBottom, y1 = kTop;
        out_ += fmt::format("<g stroke=\"black\" stroke-width=\"1\">\n");
        out_ += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\"/>\n", x0, y0, x1, y0);
        out_ += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\"/>\n", x0, y0, x0, y1);
        out_ += "</g>\n";
        out_ += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
        for (int i = 0; i <= kTicks; ++i) {
            const double t = static_cast<double>(i) / kTicks;
            const double xv = x_.lo + t * (x_.hi - x_.lo);
            const double yv = y_.lo + t * (y_.hi - y_.lo);
            out_ += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n",
                                px(xv), y0 + 16.0, xv);
            out_ += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n",
                                x0 - 6.0, py(yv) + 4.0, yv);
            out_ += fmt::format(
                "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#dddddd\"/>\n",
                x0, py(yv), x1, py(yv));
        }
        out_ += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                            (x0 + x1) / 2.0, kHeight - 12.0, escape(x_label));
        out_ += fmt::format(
            "<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
            (y0 + y1) / 2.0, (y0 + y1) / 2.0, escape(y_label));
        out_ += "</g>\n";
    }

    void polyline(const Series& s, const char* color) {
        out_ += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"", color);
        const std::size_t n = std::min(s.x.size(), s.y.size());
        bool first = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            out_ += fmt::format("{}{:.2f},{:.2f}", first ? "" : " ", px(s.x[i]), py(s.y[i]));
            first = false;
        }
        out_ += "\"/>\n";
    }

    void legend_entry(std::size_t index, std::string_view name, const char* color) {
        const double x = kWidth - kRight + 12.0;
        const double y = kTop + 14.0 + 18.0 * static_cast<double>(index);
        out_ += fmt::format(
            "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"3\"/>\n",
            x, y - 4.0, x + 18.0, y - 4.0, color);
        out_ += fmt::format(
            "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            x + 24.0, y, escape(name));
    }

    void rect(double x0, double y0, double x1, double y1, const char* color) {
        out_ += fmt::format(
            "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" stroke=\"black\" stroke-width=\"0.5\"/>\n",
            px(x0), py(y1), px(x1) - px(x0), py(y0) - py(y1), color);
    }

    std::string finish() {
        out_ += "</svg>\n";
        return std::move(out_);
    }

private:
    Range x_;
    Range y_;
    std::string out_;
};

}  // namespace

std::string render(const LinePlot& plot) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double yhi = -std::numeric_limits<double>::infinity();
    double ylo = 0.0;
    for (const auto& s : plot.series) {
        for (double v : s.x) {
            if (!std::isfinite(v)) continue;
            xlo = std::min(xlo, v);
            xhi = std::max(xhi, v);
        }
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            ylo = std::min(ylo, v);
            yhi = std::max(yhi, v);
        }
    }
    Canvas canvas(padded(xlo, xhi), padded(ylo, yhi));
    canvas.header(plot.title);
    canvas.axes(plot.x_label, plot.y_label);
    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        canvas.polyline(plot.series[i], color);
        canvas.legend_entry(i, plot.series[i].name, color);
    }
    return canvas.finish();
}

std::string render(const Histogram& hist) {
    const int bins = std::max(1, hist.bins);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : hist.values) {
        if (!std::isfinite(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const Range xr = padded(std::min(lo, 0.0), hi);
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    const double width = (xr.hi - xr.lo) / bins;
    for (double v : hist.values) {
        if (!std::isfinite(v)) continue;
        auto b = static_cast<int>((v - xr.lo) / width);
        b = std::clamp(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    const int max_count = counts.empty() ? 1 : std::max(1, *std::max_element(counts.begin(), counts.end()));
    Canvas canvas(xr, {0.0, static_cast<double>(max_count)});
    canvas.header(hist.title);
    canvas.axes(hist.x_label, "count");
    for (int b = 0; b < bins; ++b) {
        if (counts[static_cast<std::size_t>(b)] == 0) continue;
        canvas.rect(xr.lo + b * width, 0.0, xr.lo + (b + 1) * width,
                    counts[static_cast<std::size_t>(b)], kPalette[0]);
    }
    return canvas.finish();
}

}  // namespace craterloc::svg
