#include "craterloc/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace craterloc {

Eigenvalues2 eigenvalues(const Cov2& c) noexcept {
    const double half_trace = 0.5 * c.trace();
    const double half_diff = 0.5 * (c.xx - c.yy);
    const double radius = std::hypot(half_diff, c.xy);
    return {half_trace + radius, half_trace - radius};
}

Vec2 weighted_mean(std::span<const Particle> particles) {
    const auto w = normalize_log_weights(log_weights(particles));
    Vec2 mu;
    for (std::size_t i = 0; i < particles.size(); ++i) mu += particles[i].position * w[i];
    return mu;
}

Cov2 weighted_covariance(std::span<const Particle> particles) {
    const auto w = normalize_log_weights(log_weights(particles));
    Vec2 mu;
    for (std::size_t i = 0; i < particles.size(); ++i) mu += particles[i].position * w[i];
    Cov2 cov;
    for (std::size_t i = 0; i < particles.size(); ++i) {
        const Vec2 d = particles[i].position - mu;
        cov.xx += w[i] * d.x * d.x;
        cov.xy += w[i] * d.x * d.y;
        cov.yy += w[i] * d.y * d.y;
    }
    return cov;
}

double uncertainty(const Cov2& cov) noexcept {
    return std::sqrt(std::max(0.0, eigenvalues(cov).max));
}

double uncertainty(std::span<const Particle> particles) {
    return uncertainty(weighted_covariance(particles));
}

double mahalanobis(const Vec2& mean, const Cov2& cov, const Vec2& gt) noexcept {
    const Vec2 d = mean - gt;
    if (d.x == 0.0 && d.y == 0.0) return 0.0;

    Cov2 c = cov;
    const auto ev = eigenvalues(c);
    if (!(ev.min > 0.0) || ev.max / ev.min > kMahalanobisMaxCondition) {
        c.xx += kMahalanobisRegularization;
        c.yy += kMahalanobisRegularization;
    }
    const double det = c.determinant();
    if (!(det > 0.0) || !std::isfinite(det)) return std::numeric_limits<double>::infinity();
    // d^T C^-1 d with the closed-form 2x2 inverse.
    const double q = (c.yy * d.x * d.x - 2.0 * c.xy * d.x * d.y + c.xx * d.y * d.y) / det;
    return std::sqrt(std::max(0.0, q));
}

double mahalanobis(std::span<const Particle> particles, const Vec2& gt) {
    return mahalanobis(weighted_mean(particles), weighted_covariance(particles), gt);
}

StepMetrics compute_step_metrics(std::span<const Particle> particles, const Vec2& gt, double n_eff,
                                 bool resampled) {
    const Vec2 mu = weighted_mean(particles);
    const Cov2 cov = weighted_covariance(particles);
    return {distance(mu, gt), uncertainty(cov), mahalanobis(mu, cov, gt), n_eff, resampled};
}

double pixel_error_to_meters(double err_px, double range_gt, double focal_length,
                             double sensor_size) {
    const double denom = focal_length * sensor_size;
    if (!(denom > 0.0)) throw std::invalid_argument("focal_length * sensor_size must be > 0");
    return err_px * range_gt / denom;
}

double gaussian_edge_score(std::span<const double> distance_errors, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (distance_errors.empty()) return 0.0;
    double total = 0.0;
    for (double d : distance_errors) total += std::exp(-d * d / (2.0 * sigma * sigma));
    return total / static_cast<double>(distance_errors.size());
}

double front_arc_percent(std::span<const Vec2> detections, const Pose& pose, const Crater& crater,
                         double tolerance, double arc_sample_spacing) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
    const auto samples = sample_arc(crater, front_arc(pose, crater), arc_sample_spacing);
    const double tol_sq = tolerance * tolerance;
    std::size_t hit = 0;
    for (const Vec2& s : samples) {
        const bool matched = std::any_of(detections.begin(), detections.end(), [&](const Vec2& d) {
            return (d - s).squared_norm() <= tol_sq;
        });
        if (matched) ++hit;
    }
    return 100.0 * static_cast<double>(hit) / static_cast<double>(samples.size());
}

}  // namespace craterloc
