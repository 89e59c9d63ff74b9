#include "craterloc/filter.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace craterloc {

namespace {
// Sub-stream key for the resampling draw of a step; particle keys are < N.
constexpr std::uint64_t kResampleKey = ~std::uint64_t{0};
}  // namespace

std::string_view to_string(ResamplerKind kind) noexcept {
    switch (kind) {
        case ResamplerKind::systematic: return "systematic";
        case ResamplerKind::multinomial: return "multinomial";
        case ResamplerKind::residual: return "residual";
        case ResamplerKind::stratified: return "stratified";
    }
    return "unknown";
}

ResamplerKind parse_resampler(std::string_view name) {
    for (auto kind : kAllResamplers) {
        if (to_string(kind) == name) return kind;
    }
    throw ConfigError(fmt::format("unknown resampler '{}' (expected systematic, multinomial, "
                                  "residual or stratified)", name));
}

void FilterConfig::validate() const {
    if (n_particles < 1) throw ConfigError("filter.n_particles must be >= 1");
    if (!(n_eff_threshold > 0.0 && n_eff_threshold <= static_cast<double>(n_particles))) {
        throw ConfigError("filter.n_eff_threshold must satisfy 0 < threshold <= n_particles");
    }
    if (!(init_sigma >= 0.0)) throw ConfigError("filter.init_sigma must be >= 0");
    if (!std::isfinite(init_mean.x) || !std::isfinite(init_mean.y)) {
        throw ConfigError("filter.init_mean must be finite");
    }
}

FilterState init_filter(const FilterConfig& cfg, const MotionConfig& motion,
                        const QScoreConfig& qscore) {
    cfg.validate();
    motion.validate();
    qscore.validate();

    FilterState state;
    state.config = cfg;
    state.motion = motion;
    state.qscore = qscore;
    state.rng = RngStream(cfg.seed);
    state.particles.reserve(static_cast<std::size_t>(cfg.n_particles));
    for (int i = 0; i < cfg.n_particles; ++i) {
        RngStream sub = state.rng.split(0, i);
        const double dx = sub.normal(0.0, cfg.init_sigma);
        const double dy = sub.normal(0.0, cfg.init_sigma);
        state.particles.push_back({cfg.init_mean + Vec2{dx, dy}, 0.0});
    }
    state.last_n_eff = static_cast<double>(cfg.n_particles);
    return state;
}

std::vector<double> log_weights(std::span<const Particle> particles) {
    std::vector<double> out(particles.size());
    std::transform(particles.begin(), particles.end(), out.begin(),
                   [](const Particle& p) { return p.log_weight; });
    return out;
}

void apply_log_scores(std::span<Particle> particles, std::span<const double> log_scores) {
    if (particles.size() != log_scores.size()) {
        throw std::invalid_argument("one log score per particle required");
    }
    if (particles.empty()) return;
    const double q_min = *std::min_element(log_scores.begin(), log_scores.end());
    for (std::size_t i = 0; i < particles.size(); ++i) {
        particles[i].log_weight += log_scores[i] - q_min;
    }
}

double n_eff(std::span<const double> log_weights) {
    const auto w = normalize_log_weights(log_weights);
    double sum_sq = 0.0;
    for (double x : w) sum_sq += x * x;
    return 1.0 / sum_sq;
}

double n_eff(std::span<const Particle> particles) {
    return n_eff(log_weights(particles));
}

FilterState step(FilterState state, const OdometryStep& odo,
                 std::span<const EdgeObservation> observations, const OrbitalMap& map) {
    validate_step(odo, state.motion);
    const std::uint64_t t = state.step + 1;

    for (std::size_t i = 0; i < state.particles.size(); ++i) {
        RngStream sub = state.rng.split(t, i);
        state.particles[i].position = propagate_sample(state.particles[i].position, odo, state.motion, sub);
    }
    state.step = t;
    state.last_resampled = false;

    if (observations.empty()) {
        state.last_n_eff = n_eff(state.particles);
        return state;
    }

    std::vector<double> scores(state.particles.size());
    for (std::size_t i = 0; i < state.particles.size(); ++i) {
        scores[i] = *log_q_score(state.particles[i].position, odo.heading_after, observations, map,
                                 state.qscore);
    }
    apply_log_scores(state.particles, scores);

    state.last_n_eff = n_eff(state.particles);
    if (state.last_n_eff <= state.config.n_eff_threshold) {
        RngStream sub = state.rng.split(t, kResampleKey);
        state.particles = resample(state.config.resampler, state.particles, sub);
        state.last_resampled = true;
    }
    return state;
}

}  // namespace craterloc
