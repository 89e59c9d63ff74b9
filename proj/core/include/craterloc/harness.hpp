// Single trials, Monte Carlo batches and resampler sweeps over a scenario.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "craterloc/experiment_config.hpp"
#include "craterloc/filter.hpp"
#include "craterloc/metrics.hpp"
#include "craterloc/motion.hpp"
#include "craterloc/sensing.hpp"
#include "craterloc/world.hpp"

namespace craterloc {

/// Loaded, validated inputs shared read-only by every trial.
struct Scenario {
    ExperimentConfig config;
    OrbitalMap map;
    Trajectory path;  ///< waypoints resampled to motion.max_step spacing
    std::optional<ObservationLog> observation_log;
};

/// Throws LoadError / MapError / ConfigError.
[[nodiscard]] Scenario load_scenario(const ExperimentConfig& cfg);
[[nodiscard]] Scenario make_scenario(const ExperimentConfig& cfg, OrbitalMap map,
                                     const Trajectory& waypoints);

struct StepRecord {
    long step{0};
    Vec2 gt;
    Vec2 mu;
    StepMetrics metrics;
    std::size_t n_observations{0};
};

struct TrialResult {
    std::uint64_t seed{0};
    std::vector<StepRecord> steps;
    bool failed{false};
    std::string failure;

    [[nodiscard]] const StepRecord& initial() const { return steps.front(); }
    [[nodiscard]] const StepRecord& final() const { return steps.back(); }
};

/// Called after every filter step (and once for the initial state).
using StateCallback = std::function<void(const FilterState&)>;
/// Called with each frame's observations, keyed by step.
using ObservationCallback = std::function<void(long, const std::vector<EdgeObservation>&)>;

struct TrialHooks {
    StateCallback on_state;
    ObservationCallback on_observations;
};

/// Deterministic in (scenario, seed). A filter collapse ends the trial
/// early with failed = true; no exception escapes.
[[nodiscard]] TrialResult run_trial(const Scenario& scenario, std::uint64_t seed,
                                    const TrialHooks& hooks = {});

struct MeanStd {
    double mean{0.0};
    double stddev{0.0};  ///< sample standard deviation (n - 1); 0 for n = 1
};

[[nodiscard]] MeanStd mean_std(std::span<const double> values) noexcept;

struct RunSummary {
    std::vector<std::uint64_t> seeds;
    std::vector<double> initial_error;
    std::vector<double> final_error;
    std::vector<double> final_uncertainty;
    std::vector<double> final_mahalanobis;
    std::vector<bool> failed;
    MeanStd error;
    MeanStd uncertainty;
    MeanStd mahalanobis;
    MeanStd initial;

    [[nodiscard]] int failed_count() const noexcept;
};

[[nodiscard]] RunSummary summarize(std::span<const TrialResult> trials);

struct BatchResult {
    std::vector<TrialResult> trials;
    RunSummary summary;
};

/// Seeds first_seed .. first_seed + n_seeds - 1. Results never depend on `jobs`.
[[nodiscard]] BatchResult run_batch(const Scenario& scenario, std::uint64_t first_seed, int n_seeds,
                                    int jobs = 1);

/// Every resampler on the same seeds.
[[nodiscard]] std::map<ResamplerKind, BatchResult> run_sweep(const Scenario& scenario,
                                                             std::uint64_t first_seed,
                                                             int n_seeds, int jobs = 1);

/// Across-seed variance of sqrt(lambda_max) at each step, averaged over the
/// steps every trial reached.
[[nodiscard]] double uncertainty_trace_variance(const BatchResult& batch);

/// Per-step mean of a metric across trials (truncated to the shortest trial).
[[nodiscard]] std::vector<double> mean_trace(const BatchResult& batch,
                                             double StepMetrics::*field);

// --- file formats -------------------------------------------------------

inline constexpr std::string_view kMetricsHeader =
    "step,gt_x,gt_y,mu_x,mu_y,gt_error_m,sqrt_lambda_max_m,mahalanobis,n_eff,resampled";

[[nodiscard]] std::string format_metrics_csv(const TrialResult& trial);
[[nodiscard]] std::string format_summary_csv(const RunSummary& summary);
[[nodiscard]] std::string format_state_json(const FilterState& state);
[[nodiscard]] std::string format_sweep_csv(const std::map<ResamplerKind, BatchResult>& sweep);

struct MetricsTable {
    std::vector<long> step;
    std::vector<double> gt_error;
    std::vector<double> uncertainty;
};

/// Parses a metrics CSV. Throws SchemaError on missing columns or no rows.
[[nodiscard]] MetricsTable parse_metrics_csv(std::string_view text);

struct SvgFile {
    std::string name;
    std::string content;
};

/// Error and uncertainty traces for one metrics CSV.
[[nodiscard]] std::vector<SvgFile> emit_plots(std::string_view metrics_csv);
[[nodiscard]] std::vector<SvgFile> batch_plots(const BatchResult& batch);
[[nodiscard]] std::vector<SvgFile> sweep_plots(const std::map<ResamplerKind, BatchResult>& sweep);

void write_text_file(const std::filesystem::path& path, std::string_view content);
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace craterloc
