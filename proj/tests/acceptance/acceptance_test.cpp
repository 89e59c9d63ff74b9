// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "craterloc/experiment_config.hpp"
#include "craterloc/filter.hpp"
#include "craterloc/harness.hpp"
#include "craterloc/metrics.hpp"
#include "craterloc/qscore.hpp"
#include "craterloc/sensing.hpp"
#include "../unit/test_support.hpp"

using namespace craterloc;

namespace {

const std::filesystem::path kSource{CRATERLOC_SOURCE_DIR};

struct Outcome {
    bool pass{false};
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Scenario scenario_for(const char* config) {
    return load_scenario(load_experiment_config(kSource / "configs" / config));
}

// 1. Analytic Q-Score against a rim-sampled oracle.
Outcome qscore_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(20240601);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto inst = testing::random_qscore_instance(gen);
        const double analytic = *q_score(inst.belief, inst.heading, inst.observations, inst.map);
        const double oracle = *testing::sampled_q_score(inst.belief, inst.heading, inst.observations, inst.map);
        worst = std::max(worst, std::abs(analytic - oracle));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-3 && secs < 10.0,
            fmt::format("1000 instances, max |diff| = {:.3g} (<= 1e-3), {:.1f} s (< 10 s)", worst, secs)};
}

std::vector<double> random_weights(std::mt19937_64& gen, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(n);
    double total = 0.0;
    for (double& x : w) total += (x = e(gen));
    for (double& x : w) x /= total;
    return w;
}

bool within_floor_ceil(const std::vector<double>& w, const std::vector<std::size_t>& idx) {
    std::vector<int> c(w.size(), 0);
    for (auto i : idx) ++c[i];
    const double n = static_cast<double>(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (c[i] < std::floor(n * w[i] - 1e-9) || c[i] > std::ceil(n * w[i] + 1e-9)) return false;
    }
    return true;
}

// 2. Copy-count laws of the four resamplers.
Outcome resampler_laws() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int bad_vectors = 0;
    for (int v = 0; v < 1000; ++v) {
        const auto w = random_weights(gen, 1 + static_cast<std::size_t>(v % 100));
        const double u0 = unit(gen) / static_cast<double>(w.size());
        if (!within_floor_ceil(w, systematic_indices(w, u0))) ++bad_vectors;
    }
    int bad_sweep = 0;
    const std::vector<std::vector<double>> sweep_weights{{0.5, 0.25, 0.25}, random_weights(gen, 10)};
    for (const auto& w : sweep_weights) {
        for (int k = 0; k < 10000; ++k) {
            const double u0 = (k / 10000.0) / static_cast<double>(w.size());
            if (!within_floor_ceil(w, systematic_indices(w, u0))) ++bad_sweep;
        }
    }

    const std::size_t n = 16;
    const auto w = random_weights(gen, n);
    const int trials = 10000;
    std::string biased;
    for (auto kind : kAllResamplers) {
        std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
        for (int t = 0; t < trials; ++t) {
            RngStream rng(static_cast<std::uint64_t>(t) + 1);
            std::vector<int> c(n, 0);
            for (auto i : resample_indices(kind, w, rng)) ++c[i];
            for (std::size_t i = 0; i < n; ++i) {
                sum[i] += c[i];
                sum_sq[i] += static_cast<double>(c[i]) * c[i];
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double mean = sum[i] / trials;
            const double se = std::sqrt(std::max(0.0, sum_sq[i] / trials - mean * mean) / trials);
            const double expected = static_cast<double>(n) * w[i];
            const bool ok = se == 0.0 ? std::abs(mean - expected) <= 1e-9
                                      : std::abs(mean - expected) <= 3.0 * se;
            if (!ok) {
                biased += fmt::format(" {}[{}]", to_string(kind), i);
            }
        }
    }
    const double secs = seconds_since(t0);
    return {bad_vectors == 0 && bad_sweep == 0 && biased.empty() && secs < 60.0,
            fmt::format("floor/ceil violations: {} of 1000 vectors, {} of 20000 u0 sweep points; "
                        "biased counts:{}; {:.1f} s (< 60 s)",
                        bad_vectors, bad_sweep, biased.empty() ? " none" : biased, secs)};
}

// 3. Convergence on the trajectory-2 and trajectory-3 analogs.
Outcome convergence() {
    const auto t0 = Clock::now();
    bool pass = true;
    std::string detail;
    for (const char* name : {"traj2.json", "traj3.json"}) {
        const Scenario s = scenario_for(name);
        const auto& c = s.config;
        const bool protocol = c.n_seeds == 25 && c.filter.n_particles == 100 && c.filter.init_sigma == 3.0 &&
                              c.motion.drift_fraction == 0.02 && c.filter.resampler == ResamplerKind::systematic &&
                              c.filter.n_eff_threshold == 50.0;
        const BatchResult b = run_batch(s, c.seed, c.n_seeds);
        const bool ok = protocol && b.summary.error.mean <= 4.0 && b.summary.error.mean < b.summary.initial.mean &&
                        b.summary.failed_count() == 0;
        pass = pass && ok;
        detail += fmt::format("{} final {:.2f} +/- {:.2f} m vs initial {:.2f} m, {} failed; ", name,
                              b.summary.error.mean, b.summary.error.stddev, b.summary.initial.mean,
                              b.summary.failed_count());
    }
    const double secs = seconds_since(t0);
    return {pass && secs < 300.0, detail + fmt::format("{:.1f} s (< 300 s)", secs)};
}

// 4. Systematic vs multinomial uncertainty-trace variance.
Outcome resampler_comparison() {
    const Scenario s = scenario_for("traj2.json");
    Scenario sys = s;
    sys.config.filter.resampler = ResamplerKind::systematic;
    Scenario mul = s;
    mul.config.filter.resampler = ResamplerKind::multinomial;
    const double v_sys = uncertainty_trace_variance(run_batch(sys, s.config.seed, 25));
    const double v_mul = uncertainty_trace_variance(run_batch(mul, s.config.seed, 25));
    return {v_sys <= v_mul,
            fmt::format("trace variance systematic {:.4f} m^2 vs multinomial {:.4f} m^2", v_sys, v_mul)};
}

// 5. Dead reckoning against the random-walk prediction.
Outcome dead_reckoning() {
    const Scenario s = scenario_for("dead_reckoning.json");
    const int seeds = 200;
    double sx = 0.0, sy = 0.0;
    double length = 0.0;
    for (std::size_t k = 1; k < s.path.size(); ++k) length += distance(s.path[k - 1], s.path[k]);
    for (int i = 0; i < seeds; ++i) {
        const TrialResult r = run_trial(s, s.config.seed + static_cast<std::uint64_t>(i));
        const Vec2 d = r.final().mu - r.final().gt;
        sx += d.x * d.x;
        sy += d.y * d.y;
    }
    const double rx = std::sqrt(sx / seeds);
    const double ry = std::sqrt(sy / seeds);
    const std::size_t n_steps = s.path.size() - 1;
    // Each 1 m step adds per-axis variance (drift * step)^2.
    const double predicted = s.config.motion.drift_fraction * length / std::sqrt(static_cast<double>(n_steps));
    const bool ok = !s.config.sensor.enabled() && std::abs(rx - predicted) <= 0.1 * predicted &&
                    std::abs(ry - predicted) <= 0.1 * predicted;
    return {ok, fmt::format("{:.0f} m, {} seeds: RMS x {:.4f} m, y {:.4f} m vs predicted {:.4f} m (+/- 10%)", length,
                            seeds, rx, ry, predicted)};
}

// 6. Sensor envelope at 10 m and the 20 m cutoff.
Outcome sensor_envelope() {
    SensorConfig cfg;
    cfg.range_noise_sigma_fraction = 0.0;
    cfg.false_positive_rate = 0.0;
    const Crater c{1, {0, 0}, 9.2, 1.0};
    const OrbitalMap map({c});
    const Pose at10({c.radius() + 10.0, 0.0}, kPi);
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        RngStream rng(s);
        std::vector<Vec2> world;
        for (const auto& o : observe(at10, map, cfg, rng)) world.push_back(rover_to_world(at10, o));
        sum += front_arc_percent(world, at10, c, 1e-3, cfg.arc_sample_spacing) / 100.0;
    }
    const double mean = sum / 100.0;

    SensorConfig noisy;
    noisy.false_positive_rate = 0.0;
    long beyond = 0;
    for (double range = 20.01; range <= 40.0; range += 0.5) {
        const Pose pose({c.radius() + range, 0.0}, kPi);
        for (std::uint64_t s = 0; s < 100; ++s) {
            RngStream rng(s);
            beyond += static_cast<long>(observe(pose, map, noisy, rng).size());
        }
    }
    return {std::abs(mean - 0.8) <= 0.05 && beyond == 0,
            fmt::format("mean front-arc fraction at 10 m {:.4f} (0.80 +/- 0.05); detections beyond 20 m: {}",
                        mean, beyond)};
}

// 7. Degeneracy with a two-cluster initialization.
Outcome degeneracy() {
    const OrbitalMap map = load_map(kSource / "maps" / "table1.json");
    const Vec2 truth_start{60, 112};
    FilterConfig fc;
    fc.init_mean = truth_start;
    fc.init_sigma = 0.5;
    fc.seed = 3;
    FilterState state = init_filter(fc);
    const int n = fc.n_particles;
    for (int i = n / 2; i < n; ++i) state.particles[static_cast<std::size_t>(i)].position += Vec2{50.0, 0.0};

    const SensorConfig sensor;
    Pose truth(truth_start, kPi / 2);
    int fired_at = -1;
    bool reset_ok = false;
    double min_n_eff = INFINITY;
    for (int t = 1; t <= 10 && fired_at < 0; ++t) {
        const OdometryStep odo{{1, 0}, kPi / 2};
        truth = ground_truth_advance(truth, odo);
        RngStream rng(static_cast<std::uint64_t>(t));
        state = step(std::move(state), odo, observe(truth, map, sensor, rng), map);
        min_n_eff = std::min(min_n_eff, state.last_n_eff);
        if (state.last_resampled) {
            fired_at = t;
            reset_ok = static_cast<int>(state.particles.size()) == n;
            for (const auto& p : state.particles) reset_ok = reset_ok && p.log_weight == 0.0;
        }
    }
    const bool ok = fired_at > 0 && min_n_eff < fc.n_eff_threshold && reset_ok;
    return {ok, fmt::format("N_eff {:.2f} < {:.0f}, resampled at step {}, post-resample weights reset and count {}: {}",
                            min_n_eff, fc.n_eff_threshold, fired_at, n, reset_ok ? "yes" : "no")};
}

// 8. Metrics module examples.
Outcome metric_examples() {
    constexpr double tol = 1e-9;
    std::vector<std::string> failures;
    auto check = [&](const char* what, double got, double want) {
        if (!(std::abs(got - want) <= tol)) failures.push_back(fmt::format("{} got {:.12g} want {:.12g}", what, got, want));
    };
    auto ps = [](std::vector<Vec2> pos, std::vector<double> w) {
        std::vector<Particle> out;
        for (std::size_t i = 0; i < pos.size(); ++i) out.push_back({pos[i], std::log(w[i])});
        return out;
    };

    const Vec2 m1 = weighted_mean(ps({{1, 2}, {3, -4}, {8, 5}}, {1, 1, 1}));
    check("uniform mean x", m1.x, 4.0);
    check("uniform mean y", m1.y, 1.0);
    const Vec2 m2 = weighted_mean(ps({{1, 2}, {3, -4}}, {1, 0}));
    check("degenerate mean x", m2.x, 1.0);
    check("degenerate mean y", m2.y, 2.0);
    const Vec2 m3 = weighted_mean(ps({{0, 0}, {2, 0}}, {0.75, 0.25}));
    check("weighted mean x", m3.x, 0.5);
    check("weighted mean y", m3.y, 0.0);

    const Cov2 c1 = weighted_covariance(ps({{3, 3}, {3, 3}}, {0.4, 0.6}));
    check("identical cov", std::abs(c1.xx) + std::abs(c1.xy) + std::abs(c1.yy), 0.0);
    const Cov2 c2 = weighted_covariance(ps({{-1, 0}, {1, 0}}, {1, 1}));
    check("pair cov xx", c2.xx, 1.0);
    check("pair cov xy", c2.xy, 0.0);
    check("pair cov yy", c2.yy, 0.0);

    check("uncertainty zero", uncertainty(Cov2{0, 0, 0}), 0.0);
    check("uncertainty diag", uncertainty(Cov2{1, 0, 0}), 1.0);
    check("uncertainty [[2,1],[1,2]]", uncertainty(Cov2{2, 1, 2}), std::sqrt(3.0));

    check("mahalanobis mu=gt", mahalanobis(Vec2{1, 1}, Cov2{1, 0, 1}, Vec2{1, 1}), 0.0);
    check("mahalanobis identity", mahalanobis(Vec2{0, 0}, Cov2{1, 0, 1}, Vec2{0, 2}), 2.0);
    check("mahalanobis diag(4,1)", mahalanobis(Vec2{2, 0}, Cov2{4, 0, 1}, Vec2{0, 0}), 1.0);

    check("pixel error 0", pixel_error_to_meters(0.0, 10.0, 100.0, 10.0), 0.0);
    check("pixel error 5", pixel_error_to_meters(5.0, 10.0, 100.0, 10.0), 0.05);
    check("pixel error range x2", pixel_error_to_meters(5.0, 20.0, 100.0, 10.0), 0.1);

    check("edge score zeros", gaussian_edge_score(std::vector<double>{0.0, 0.0}), 1.0);
    check("edge score sigma", gaussian_edge_score(std::vector<double>{0.25}), std::exp(-0.5));
    check("edge score (0, large)", gaussian_edge_score(std::vector<double>{0.0, 1e3}), 0.5);
    check("edge score empty", gaussian_edge_score(std::vector<double>{}), 0.0);

    const Crater c{1, {0, 0}, 9.2, 1.0};
    const Pose pose({15, 0}, kPi);
    const auto samples = sample_arc(c, front_arc(pose, c), 0.25);
    check("arc percent full", front_arc_percent(samples, pose, c, 1e-6), 100.0);
    check("arc percent empty", front_arc_percent(std::vector<Vec2>{}, pose, c, 1e-6), 0.0);
    double spacing = 0.25;
    auto even = samples;
    while (even.size() % 2 != 0) {
        spacing *= 0.97;
        even = sample_arc(c, front_arc(pose, c), spacing);
    }
    std::vector<Vec2> alternate;
    for (std::size_t k = 0; k < even.size(); k += 2) alternate.push_back(even[k]);
    check("arc percent alternate", front_arc_percent(alternate, pose, c, 1e-6, spacing), 50.0);

    std::string detail = failures.empty() ? "all examples within 1e-9" : "";
    for (const auto& f : failures) detail += f + "; ";
    return {failures.empty(), detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"Q-Score oracle equivalence", qscore_oracle},
        {"Resampler count laws", resampler_laws},
        {"Convergence on trajectory analogs", convergence},
        {"Systematic vs multinomial trace variance", resampler_comparison},
        {"Dead-reckoning control", dead_reckoning},
        {"Sensor envelope", sensor_envelope},
        {"Degeneracy handling", degeneracy},
        {"Metric examples", metric_examples},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        if (!o.pass) ++failed;
        std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
