// Localization metrics over a weighted particle cloud and detection
// metrics over edge point sets.

#pragma once

#include <span>
#include <vector>

#include "craterloc/filter.hpp"
#include "craterloc/world.hpp"

namespace craterloc {

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Cov2 {
    double xx{0.0};
    double xy{0.0};
    double yy{0.0};

    [[nodiscard]] double determinant() const noexcept { return xx * yy - xy * xy; }
    [[nodiscard]] double trace() const noexcept { return xx + yy; }
};

struct Eigenvalues2 {
    double max{0.0};
    double min{0.0};
};

[[nodiscard]] Eigenvalues2 eigenvalues(const Cov2& c) noexcept;

struct StepMetrics {
    double gt_error{0.0};
    double sqrt_lambda_max{0.0};
    double mahalanobis{0.0};
    double n_eff{0.0};
    bool resampled{false};
};

/// Sum of w~_i b_i. Throws WeightCollapseError.
[[nodiscard]] Vec2 weighted_mean(std::span<const Particle> particles);

/// Sum of w~_i (b_i - mu)(b_i - mu)^T.
[[nodiscard]] Cov2 weighted_covariance(std::span<const Particle> particles);

/// sqrt(lambda_max) of a covariance.
[[nodiscard]] double uncertainty(const Cov2& cov) noexcept;
[[nodiscard]] double uncertainty(std::span<const Particle> particles);

/// Covariance regularization applied inside mahalanobis() only.
inline constexpr double kMahalanobisRegularization = 1e-9;
inline constexpr double kMahalanobisMaxCondition = 1e12;

/// sqrt((mu - gt)^T cov^-1 (mu - gt)). Adds 1e-9 I when the condition
/// number exceeds 1e12; returns +inf if the result is still singular.
[[nodiscard]] double mahalanobis(const Vec2& mean, const Cov2& cov, const Vec2& gt) noexcept;
[[nodiscard]] double mahalanobis(std::span<const Particle> particles, const Vec2& gt);

[[nodiscard]] StepMetrics compute_step_metrics(std::span<const Particle> particles, const Vec2& gt,
                                               double n_eff, bool resampled);

/// Image-space detection error converted to meters:
/// err_px * range_gt / (focal_length * sensor_size). Throws std::invalid_argument.
[[nodiscard]] double pixel_error_to_meters(double err_px, double range_gt, double focal_length,
                                           double sensor_size);

/// Mean of exp(-d^2 / (2 sigma^2)); 0 for no detections.
[[nodiscard]] double gaussian_edge_score(std::span<const double> distance_errors,
                                         double sigma = 0.25);

/// Percentage of front-arc samples with a detection within `tolerance`.
[[nodiscard]] double front_arc_percent(std::span<const Vec2> detections, const Pose& pose,
                                       const Crater& crater, double tolerance,
                                       double arc_sample_spacing = 0.25);

}  // namespace craterloc
