#include "craterloc/sensing.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace craterloc {

namespace {

// Range noise is truncated so every return stays within max_range + 3 sigma.
constexpr double kNoiseTruncation = 3.0;

class FrameBuilder {
public:
    FrameBuilder(const Pose& pose, const SensorConfig& cfg, RngStream& rng)
        : pose_(pose), cfg_(cfg), rng_(rng) {}

    void emit_rim_point(const Vec2& world, double keep_probability) {
        EdgeObservation obs = world_to_rover(pose_, world);
        const double range = obs.range();
        if (!(range > 0.0) || range > cfg_.max_range) return;
        if (std::abs(bearing(obs)) > cfg_.fov_half_angle) return;
        if (!rng_.bernoulli(keep_probability)) return;
        if (cfg_.range_noise_sigma_fraction > 0.0) {
            const double z = std::clamp(rng_.normal(), -kNoiseTruncation, kNoiseTruncation);
            const double scale = 1.0 + z * cfg_.range_noise_sigma_fraction;
            obs.forward *= scale;
            obs.left *= scale;
        }
        out_.push_back(obs);
    }

    void emit_false_positives() {
        const int count = rng_.poisson(cfg_.false_positive_rate);
        for (int k = 0; k < count; ++k) {
            const double b = rng_.uniform(-cfg_.fov_half_angle, cfg_.fov_half_angle);
            double u = rng_.uniform();
            while (u == 0.0) u = rng_.uniform();
            // Area-uniform over the sensed sector.
            const double r = cfg_.max_range * std::sqrt(u);
            out_.push_back({r * std::cos(b), r * std::sin(b)});
        }
    }

    std::vector<EdgeObservation> take() { return std::move(out_); }

private:
    const Pose& pose_;
    const SensorConfig& cfg_;
    RngStream& rng_;
    std::vector<EdgeObservation> out_;
};

}  // namespace

void SensorConfig::validate() const {
    if (!(max_range >= 0.0)) throw ConfigError("sensor.max_range must be >= 0");
    if (enabled() && !(full_detect_range > 0.0 && full_detect_range <= max_range)) {
        throw ConfigError("sensor.full_detect_range must satisfy 0 < full_detect_range <= max_range");
    }
    if (!(arc_fraction_at_full >= 0.0 && arc_fraction_at_full <= 1.0)) {
        throw ConfigError("sensor.arc_fraction_at_full must lie in [0, 1]");
    }
    if (!(fov_half_angle > 0.0 && fov_half_angle < kPi / 2.0)) {
        throw ConfigError("sensor.fov_half_angle must lie in (0, pi/2)");
    }
    if (!(range_noise_sigma_fraction >= 0.0 && range_noise_sigma_fraction < 1.0 / kNoiseTruncation)) {
        throw ConfigError("sensor.range_noise_sigma_fraction must lie in [0, 1/3)");
    }
    if (!(false_positive_rate >= 0.0)) throw ConfigError("sensor.false_positive_rate must be >= 0");
    if (!(arc_sample_spacing > 0.0)) throw ConfigError("sensor.arc_sample_spacing must be > 0");
    if (!(back_rim_probability >= 0.0 && back_rim_probability <= 1.0)) {
        throw ConfigError("sensor.back_rim_probability must lie in [0, 1]");
    }
}

double detection_fraction(double range, const SensorConfig& cfg) noexcept {
    if (!cfg.enabled() || range > cfg.max_range) return 0.0;
    if (cfg.detect_all) return 1.0;
    if (range >= cfg.max_range) return 0.0;
    if (range <= cfg.full_detect_range) return cfg.arc_fraction_at_full;
    return cfg.arc_fraction_at_full * (cfg.max_range - range) / (cfg.max_range - cfg.full_detect_range);
}

std::vector<EdgeObservation> observe(const Pose& true_pose, const OrbitalMap& map,
                                     const SensorConfig& cfg, RngStream& rng) {
    if (!cfg.enabled()) return {};
    FrameBuilder frame(true_pose, cfg, rng);
    for (const auto& crater : map.craters()) {
        const Vec2 to_rover = true_pose.position - crater.center;
        const double center_range = to_rover.norm();
        if (center_range == 0.0) continue;
        const double front_range = std::abs(center_range - crater.radius());
        if (front_range > cfg.max_range) continue;

        const Vec2 nearest = crater.center + to_rover * (crater.radius() / center_range);
        const EdgeObservation nearest_local = world_to_rover(true_pose, nearest);
        if (!(nearest_local.forward > 0.0) || std::abs(bearing(nearest_local)) > cfg.fov_half_angle) {
            continue;
        }

        // The whole visible arc shares the envelope value of its leading point.
        const double keep = detection_fraction(front_range, cfg);
        const Arc front = front_arc(true_pose, crater);
        for (const Vec2& p : sample_arc(crater, front, cfg.arc_sample_spacing)) {
            frame.emit_rim_point(p, keep);
        }
        if (cfg.back_rim) {
            const double keep_back = keep * cfg.back_rim_probability;
            for (const Vec2& p : sample_arc(crater, back_arc(true_pose, crater), cfg.arc_sample_spacing)) {
                frame.emit_rim_point(p, keep_back);
            }
        }
    }
    frame.emit_false_positives();
    return frame.take();
}

ObservationLog parse_observation_log(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw LoadError("observation log: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "step,forward_m,left_m") {
        throw LoadError(fmt::format("observation log: expected header 'step,forward_m,left_m', got '{}'", line));
    }
    ObservationLog log;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b, c, extra;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c, ',') ||
            std::getline(row, extra, ',')) {
            throw LoadError(fmt::format("observation log: line {}: expected three columns", lineno));
        }
        try {
            std::size_t ua = 0, ub = 0, uc = 0;
            const long step = std::stol(a, &ua);
            const double fwd = std::stod(b, &ub);
            const double left = std::stod(c, &uc);
            if (ua != a.size() || ub != b.size() || uc != c.size()) throw std::invalid_argument(line);
            log[step].push_back({fwd, left});
        } catch (const std::exception&) {
            throw LoadError(fmt::format("observation log: line {}: malformed row '{}'", lineno, line));
        }
    }
    return log;
}

ObservationLog load_observation_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(fmt::format("cannot open observation log '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_observation_log(ss.str());
}

std::string format_observation_log(const ObservationLog& log) {
    std::string out = "step,forward_m,left_m\n";
    for (const auto& [step, frame] : log) {
        for (const auto& obs : frame) {
            out += fmt::format("{},{:.17g},{:.17g}\n", step, obs.forward, obs.left);
        }
    }
    return out;
}

}  // namespace craterloc
