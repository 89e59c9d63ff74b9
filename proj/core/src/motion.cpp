#include "craterloc/motion.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace craterloc {

namespace {
constexpr double kStepSlack = 1e-9;
}

void MotionConfig::validate() const {
    if (!(drift_fraction >= 0.0)) throw ConfigError("motion.drift_fraction must be >= 0");
    if (!(max_step > 0.0)) throw ConfigError("motion.max_step must be > 0");
    if (!(heading_noise_sigma >= 0.0)) throw ConfigError("motion.heading_noise_sigma must be >= 0");
}

void validate_step(const OdometryStep& step, const MotionConfig& cfg) {
    if (step.delta.norm() > cfg.max_step + kStepSlack) {
        throw ConfigError(fmt::format("odometry step of {:.6f} m exceeds max_step {:.6f} m",
                                      step.delta.norm(), cfg.max_step));
    }
}

Vec2 propagate_sample(const Vec2& b, const OdometryStep& step, const MotionConfig& cfg,
                      RngStream& rng) {
    const double sigma = cfg.drift_fraction * step.delta.norm();
    const double nx = rng.normal();
    const double ny = rng.normal();
    return b + rotate(step.delta, step.heading_after) + Vec2{nx, ny} * sigma;
}

Pose ground_truth_advance(const Pose& pose, const OdometryStep& step) noexcept {
    return Pose(pose.position + rotate(step.delta, step.heading_after), step.heading_after);
}

Trajectory parse_trajectory_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw LoadError("trajectory: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x_m,y_m") throw LoadError(fmt::format("trajectory: expected header 'x_m,y_m', got '{}'", line));

    Trajectory out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw LoadError(fmt::format("trajectory: line {}: expected two columns", lineno));
        try {
            std::size_t used = 0;
            const std::string xs = line.substr(0, comma);
            const std::string ys = line.substr(comma + 1);
            const double x = std::stod(xs, &used);
            if (used != xs.size()) throw std::invalid_argument(xs);
            const double y = std::stod(ys, &used);
            if (used != ys.size()) throw std::invalid_argument(ys);
            out.push_back({x, y});
        } catch (const std::exception&) {
            throw LoadError(fmt::format("trajectory: line {}: malformed number in '{}'", lineno, line));
        }
    }
    if (out.size() < 2) throw LoadError("trajectory: need at least two waypoints");
    return out;
}

Trajectory load_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(fmt::format("cannot open trajectory file '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trajectory_csv(ss.str());
}

Trajectory resample_polyline(std::span<const Vec2> waypoints, double spacing) {
    if (!(spacing > 0.0)) throw std::invalid_argument("resample spacing must be > 0");
    Trajectory out;
    if (waypoints.empty()) return out;
    out.push_back(waypoints.front());

    // Distance still to travel along the polyline before the next sample.
    double need = spacing;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        Vec2 from = waypoints[i - 1];
        const Vec2 to = waypoints[i];
        double seg = distance(from, to);
        while (seg >= need - 1e-12 && seg > 0.0) {
            const double t = need / seg;
            from = from + (to - from) * t;
            out.push_back(from);
            seg = distance(from, to);
            need = spacing;
        }
        need -= seg;
    }
    if (distance(out.back(), waypoints.back()) > 1e-9) out.push_back(waypoints.back());
    return out;
}

double initial_heading(std::span<const Vec2> path) noexcept {
    for (std::size_t i = 1; i < path.size(); ++i) {
        const Vec2 d = path[i] - path[i - 1];
        if (d.squared_norm() > 0.0) return std::atan2(d.y, d.x);
    }
    return 0.0;
}

std::vector<OdometryStep> steps_along(std::span<const Vec2> path, double heading) {
    std::vector<OdometryStep> out;
    if (path.size() < 2) return out;
    out.reserve(path.size() - 1);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const Vec2 d = path[i] - path[i - 1];
        const double len = d.norm();
        if (len > 0.0) heading = std::atan2(d.y, d.x);
        out.push_back({{len, 0.0}, normalize_angle(heading)});
    }
    return out;
}

}  // namespace craterloc
