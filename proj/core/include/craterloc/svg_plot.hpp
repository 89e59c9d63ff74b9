// Minimal static SVG charts. Output is a deterministic function of the input.

#pragma once

#include <string>
#include <vector>

namespace craterloc::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

struct Histogram {
    std::string title;
    std::string x_label;
    std::vector<double> values;
    int bins{10};
};

[[nodiscard]] std::string render(const LinePlot& plot);
[[nodiscard]] std::string render(const Histogram& hist);

}  // namespace craterloc::svg
