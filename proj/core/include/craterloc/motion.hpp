// Odometry model: noiseless ground-truth advance and drift-corrupted
// particle propagation.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "craterloc/rng.hpp"
#include "craterloc/types.hpp"
#include "craterloc/world.hpp"

namespace craterloc {

/// Commanded displacement, expressed in the rover frame after turning to
/// `heading_after`. World displacement = rotate(delta, heading_after).
struct OdometryStep {
    Vec2 delta;
    double heading_after{0.0};
};

struct MotionConfig {
    double drift_fraction{0.02};      ///< per-axis sigma as a fraction of step length
    double max_step{1.0};             ///< meters
    double heading_noise_sigma{0.0};  ///< radians; noise on the heading fed to the filter
    std::uint64_t seed{0};

    /// Throws ConfigError.
    void validate() const;
};

/// Throws ConfigError when the step exceeds cfg.max_step.
void validate_step(const OdometryStep& step, const MotionConfig& cfg);

/// b + world(delta) + n, n ~ N(0, (drift_fraction * |delta|)^2 I).
/// Always consumes exactly two normal variates from `rng`.
[[nodiscard]] Vec2 propagate_sample(const Vec2& b, const OdometryStep& step,
                                    const MotionConfig& cfg, RngStream& rng);

[[nodiscard]] Pose ground_truth_advance(const Pose& pose, const OdometryStep& step) noexcept;

/// Waypoint polyline in world meters.
using Trajectory = std::vector<Vec2>;

/// CSV with header `x_m,y_m`. Throws LoadError.
[[nodiscard]] Trajectory parse_trajectory_csv(std::string_view text);
[[nodiscard]] Trajectory load_trajectory(const std::filesystem::path& path);

/// Arc-length resampling of a polyline at `spacing` meters. The final
/// waypoint is always kept, so the last segment may be shorter.
[[nodiscard]] Trajectory resample_polyline(std::span<const Vec2> waypoints, double spacing);

/// Steps that carry a rover along consecutive points of `path`, heading
/// aligned with each segment. Zero-length segments keep the prior heading.
[[nodiscard]] std::vector<OdometryStep> steps_along(std::span<const Vec2> path,
                                                    double initial_heading);

/// Heading of the first non-degenerate segment (0 if none).
[[nodiscard]] double initial_heading(std::span<const Vec2> path) noexcept;

}  // namespace craterloc
