#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "craterloc/filter.hpp"

namespace craterloc {

namespace {

// Inclusive cumulative sum, pinned to exactly 1 from the last positive weight
// on so that a comb point below 1 can never walk past it.
std::vector<double> cumulative(std::span<const double> weights) {
    std::vector<double> cum(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cum.begin());
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) last_positive = i;
    }
    std::fill(cum.begin() + static_cast<std::ptrdiff_t>(last_positive), cum.end(), 1.0);
    return cum;
}

void check_weights(std::span<const double> weights) {
    if (weights.empty()) throw WeightCollapseError("cannot resample an empty particle set");
}

// Walks a non-decreasing sequence of points in [0, 1) through the cumulative sum.
template <typename PointAt>
std::vector<std::size_t> comb_select(std::span<const double> weights, PointAt point_at) {
    const auto cum = cumulative(weights);
    const std::size_t n = weights.size();
    std::vector<std::size_t> out;
    out.reserve(n);
    std::size_t m = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double u = point_at(k);
        while (m + 1 < n && cum[m] <= u) ++m;
        out.push_back(m);
    }
    return out;
}

std::vector<std::size_t> categorical_draws(std::span<const double> weights, std::size_t count,
                                           RngStream& rng) {
    const auto cum = cumulative(weights);
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double u = rng.uniform();
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        if (it == cum.end()) --it;
        out.push_back(static_cast<std::size_t>(it - cum.begin()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<double> normalize_log_weights(std::span<const double> log_weights) {
    double max = -std::numeric_limits<double>::infinity();
    for (double w : log_weights) {
        if (std::isnan(w) || w == std::numeric_limits<double>::infinity()) {
            throw std::invalid_argument("log-weights must not be NaN or +inf");
        }
        max = std::max(max, w);
    }
    if (!std::isfinite(max)) throw WeightCollapseError("all particle weights are zero");

    std::vector<double> out(log_weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        out[i] = std::exp(log_weights[i] - max);
        total += out[i];
    }
    for (double& w : out) w /= total;
    return out;
}

std::vector<std::size_t> systematic_indices(std::span<const double> weights, double u0) {
    check_weights(weights);
    const double n = static_cast<double>(weights.size());
    if (!(u0 >= 0.0 && u0 < 1.0 / n)) throw std::invalid_argument("u0 must lie in [0, 1/N)");
    return comb_select(weights, [&](std::size_t k) { return u0 + static_cast<double>(k) / n; });
}

std::vector<std::size_t> systematic_indices(std::span<const double> weights, RngStream& rng) {
    check_weights(weights);
    const double n = static_cast<double>(weights.size());
    double u0 = rng.uniform(0.0, 1.0 / n);
    if (u0 >= 1.0 / n) u0 = 0.0;
    return systematic_indices(weights, u0);
}

std::vector<std::size_t> stratified_indices(std::span<const double> weights, RngStream& rng) {
    check_weights(weights);
    const double n = static_cast<double>(weights.size());
    std::vector<double> points(weights.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
        points[k] = std::min((static_cast<double>(k) + rng.uniform()) / n,
                             std::nextafter(static_cast<double>(k + 1) / n, 0.0));
    }
    return comb_select(weights, [&](std::size_t k) { return points[k]; });
}

std::vector<std::size_t> multinomial_indices(std::span<const double> weights, RngStream& rng) {
    check_weights(weights);
    return categorical_draws(weights, weights.size(), rng);
}

std::vector<std::size_t> residual_indices(std::span<const double> weights, RngStream& rng) {
    check_weights(weights);
    const std::size_t n = weights.size();
    const double nd = static_cast<double>(n);

    std::vector<std::size_t> out;
    out.reserve(n);
    std::vector<double> residue(n);
    double residue_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double expected = nd * weights[i];
        const double copies = std::floor(expected);
        out.insert(out.end(), static_cast<std::size_t>(copies), i);
        residue[i] = expected - copies;
        residue_total += residue[i];
    }
    // Rounding can leave the floor sum one above N when weights sum a hair over 1.
    if (out.size() > n) out.resize(n);
    const std::size_t remaining = n - out.size();
    if (remaining > 0) {
        if (!(residue_total > 0.0)) {
            residue.assign(weights.begin(), weights.end());
            residue_total = 1.0;
        }
        for (double& r : residue) r /= residue_total;
        const auto extra = categorical_draws(residue, remaining, rng);
        out.insert(out.end(), extra.begin(), extra.end());
        std::sort(out.begin(), out.end());
    }
    return out;
}

std::vector<std::size_t> resample_indices(ResamplerKind kind, std::span<const double> weights,
                                          RngStream& rng) {
    switch (kind) {
        case ResamplerKind::systematic: return systematic_indices(weights, rng);
        case ResamplerKind::multinomial: return multinomial_indices(weights, rng);
        case ResamplerKind::residual: return residual_indices(weights, rng);
        case ResamplerKind::stratified: return stratified_indices(weights, rng);
    }
    throw std::logic_error("unknown resampler");
}

std::vector<Particle> resample(ResamplerKind kind, std::span<const Particle> particles,
                               RngStream& rng) {
    const auto weights = normalize_log_weights(log_weights(particles));
    const auto ancestors = resample_indices(kind, weights, rng);
    std::vector<Particle> out;
    out.reserve(ancestors.size());
    for (std::size_t a : ancestors) out.push_back({particles[a].position, 0.0});
    return out;
}

std::vector<Particle> resample_systematic(std::span<const Particle> particles, RngStream& rng) {
    return resample(ResamplerKind::systematic, particles, rng);
}
std::vector<Particle> resample_multinomial(std::span<const Particle> particles, RngStream& rng) {
    return resample(ResamplerKind::multinomial, particles, rng);
}
std::vector<Particle> resample_residual(std::span<const Particle> particles, RngStream& rng) {
    return resample(ResamplerKind::residual, particles, rng);
}
std::vector<Particle> resample_stratified(std::span<const Particle> particles, RngStream& rng) {
    return resample(ResamplerKind::stratified, particles, rng);
}

}  // namespace craterloc
