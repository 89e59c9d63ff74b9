// Position-only particle filter with log-domain weights and effective
// sample size triggered resampling.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "craterloc/motion.hpp"
#include "craterloc/qscore.hpp"
#include "craterloc/rng.hpp"
#include "craterloc/world.hpp"

namespace craterloc {

struct Particle {
    Vec2 position;
    double log_weight{0.0};
};

enum class ResamplerKind { systematic, multinomial, residual, stratified };

[[nodiscard]] std::string_view to_string(ResamplerKind kind) noexcept;
/// Throws ConfigError on an unknown name.
[[nodiscard]] ResamplerKind parse_resampler(std::string_view name);
inline constexpr ResamplerKind kAllResamplers[] = {
    ResamplerKind::systematic, ResamplerKind::multinomial, ResamplerKind::residual,
    ResamplerKind::stratified};

struct FilterConfig {
    int n_particles{100};
    double n_eff_threshold{50.0};
    Vec2 init_mean;
    double init_sigma{3.0};  ///< meters, isotropic
    ResamplerKind resampler{ResamplerKind::systematic};
    std::uint64_t seed{0};

    /// Throws ConfigError.
    void validate() const;
};

/// Everything needed to advance one filter cycle. A plain value: copy or
/// move it between steps and threads freely.
struct FilterState {
    std::vector<Particle> particles;
    std::uint64_t step{0};
    RngStream rng;
    FilterConfig config;
    MotionConfig motion;
    QScoreConfig qscore;
    double last_n_eff{0.0};
    bool last_resampled{false};
};

/// Particles from N(init_mean, init_sigma^2 I), all log-weights 0.
[[nodiscard]] FilterState init_filter(const FilterConfig& cfg, const MotionConfig& motion = {},
                                      const QScoreConfig& qscore = {});

/// One predict/update/resample cycle. Particle i draws its motion noise
/// from a sub-stream keyed by (step, i), so propagation order never
/// affects results. With no observations the weights are left untouched
/// and the resampling check is skipped.
[[nodiscard]] FilterState step(FilterState state, const OdometryStep& odo,
                               std::span<const EdgeObservation> observations,
                               const OrbitalMap& map);

/// w_i += q_i - min_j q_j.
void apply_log_scores(std::span<Particle> particles, std::span<const double> log_scores);

/// 1 / sum(w~_i^2) with w~ normalized through log-sum-exp.
[[nodiscard]] double n_eff(std::span<const double> log_weights);
[[nodiscard]] double n_eff(std::span<const Particle> particles);

[[nodiscard]] std::vector<double> log_weights(std::span<const Particle> particles);

/// Normalized linear weights. Throws WeightCollapseError when no weight is
/// finite, std::invalid_argument on NaN or +inf.
[[nodiscard]] std::vector<double> normalize_log_weights(std::span<const double> log_weights);

// Index-level resamplers over normalized weights. Each returns exactly
// weights.size() ancestor indices in non-decreasing order.

/// Comb u0 + n/N over the cumulative sum; u0 in [0, 1/N).
[[nodiscard]] std::vector<std::size_t> systematic_indices(std::span<const double> weights, double u0);
[[nodiscard]] std::vector<std::size_t> systematic_indices(std::span<const double> weights, RngStream& rng);
[[nodiscard]] std::vector<std::size_t> multinomial_indices(std::span<const double> weights, RngStream& rng);
[[nodiscard]] std::vector<std::size_t> residual_indices(std::span<const double> weights, RngStream& rng);
[[nodiscard]] std::vector<std::size_t> stratified_indices(std::span<const double> weights, RngStream& rng);
[[nodiscard]] std::vector<std::size_t> resample_indices(ResamplerKind kind,
                                                        std::span<const double> weights,
                                                        RngStream& rng);

// Particle-level resamplers: normalize from the log domain, pick ancestors,
// return N particles with log-weight 0.
[[nodiscard]] std::vector<Particle> resample_systematic(std::span<const Particle> particles, RngStream& rng);
[[nodiscard]] std::vector<Particle> resample_multinomial(std::span<const Particle> particles, RngStream& rng);
[[nodiscard]] std::vector<Particle> resample_residual(std::span<const Particle> particles, RngStream& rng);
[[nodiscard]] std::vector<Particle> resample_stratified(std::span<const Particle> particles, RngStream& rng);
[[nodiscard]] std::vector<Particle> resample(ResamplerKind kind, std::span<const Particle> particles,
                                             RngStream& rng);

}  // namespace craterloc
