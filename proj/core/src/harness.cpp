#include "craterloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "craterloc/svg_plot.hpp"

namespace craterloc {

namespace {

// Sub-stream keys below the per-trial master stream.
enum StreamKey : std::uint64_t {
    kStartOffset = 1,
    kSensor = 2,
    kHeading = 3,
    kFilter = 4,
};

}  // namespace

Scenario make_scenario(const ExperimentConfig& cfg, OrbitalMap map, const Trajectory& waypoints) {
    cfg.validate();
    if (map.empty()) throw MapError("localization needs a non-empty map");
    if (waypoints.size() < 2) throw LoadError("trajectory needs at least two waypoints");
    Scenario s;
    s.config = cfg;
    s.map = std::move(map);
    s.path = resample_polyline(waypoints, cfg.motion.max_step);
    return s;
}

Scenario load_scenario(const ExperimentConfig& cfg) {
    Scenario s = make_scenario(cfg, load_map(cfg.map_path), load_trajectory(cfg.trajectory_path));
    if (cfg.observation_log_path) s.observation_log = load_observation_log(*cfg.observation_log_path);
    return s;
}

TrialResult run_trial(const Scenario& scenario, std::uint64_t seed, const TrialHooks& hooks) {
    const ExperimentConfig& cfg = scenario.config;
    const RngStream master(seed);

    TrialResult result;
    result.seed = seed;

    const Vec2 start = scenario.path.front();
    const double heading0 = initial_heading(scenario.path);
    Pose gt(start, heading0);

    RngStream offset_rng = master.split(kStartOffset);
    const double offset_sigma = cfg.effective_init_offset_sigma();
    const Vec2 offset{offset_rng.normal(0.0, offset_sigma), offset_rng.normal(0.0, offset_sigma)};

    FilterConfig fc = cfg.filter;
    fc.seed = master.split(kFilter).seed();
    fc.init_mean = start + offset;
    FilterState state = init_filter(fc, cfg.motion, cfg.qscore);

    const SensorConfig sensor = cfg.perfect ? perfect_sensor(cfg.sensor) : cfg.sensor;

    auto record = [&](long t, std::size_t n_obs) {
        StepRecord r;
        r.step = t;
        r.gt = gt.position;
        r.mu = weighted_mean(state.particles);
        r.metrics = compute_step_metrics(state.particles, gt.position, state.last_n_eff, state.last_resampled);
        r.n_observations = n_obs;
        result.steps.push_back(r);
        if (hooks.on_state) hooks.on_state(state);
    };

    record(0, 0);
    const auto steps = steps_along(scenario.path, heading0);
    try {
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const long t = static_cast<long>(k) + 1;
            const OdometryStep& odo = steps[k];
            gt = ground_truth_advance(gt, odo);

            std::vector<EdgeObservation> obs;
            if (scenario.observation_log) {
                if (auto it = scenario.observation_log->find(t); it != scenario.observation_log->end()) {
                    obs = it->second;
                }
            } else {
                RngStream sensor_rng = master.split(kSensor, t);
                obs = observe(gt, scenario.map, sensor, sensor_rng);
            }
            if (hooks.on_observations) hooks.on_observations(t, obs);

            OdometryStep filter_odo = odo;
            if (cfg.motion.heading_noise_sigma > 0.0) {
                RngStream heading_rng = master.split(kHeading, t);
                filter_odo.heading_after =
                    normalize_angle(odo.heading_after + heading_rng.normal(0.0, cfg.motion.heading_noise_sigma));
            }
            state = step(std::move(state), filter_odo, obs, scenario.map);
            record(t, obs.size());
        }
    } catch (const Error& e) {
        result.failed = true;
        result.failure = e.what();
    }
    return result;
}

MeanStd mean_std(std::span<const double> values) noexcept {
    MeanStd out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

int RunSummary::failed_count() const noexcept {
    return static_cast<int>(std::count(failed.begin(), failed.end(), true));
}

RunSummary summarize(std::span<const TrialResult> trials) {
    RunSummary s;
    for (const auto& t : trials) {
        s.seeds.push_back(t.seed);
        s.initial_error.push_back(t.initial().metrics.gt_error);
        s.final_error.push_back(t.final().metrics.gt_error);
        s.final_uncertainty.push_back(t.final().metrics.sqrt_lambda_max);
        s.final_mahalanobis.push_back(t.final().metrics.mahalanobis);
        s.failed.push_back(t.failed);
    }
    s.error = mean_std(s.final_error);
    s.uncertainty = mean_std(s.final_uncertainty);
    s.mahalanobis = mean_std(s.final_mahalanobis);
    s.initial = mean_std(s.initial_error);
    return s;
}

BatchResult run_batch(const Scenario& scenario, std::uint64_t first_seed, int n_seeds, int jobs) {
    if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
    BatchResult batch;
    batch.trials.resize(static_cast<std::size_t>(n_seeds));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n_seeds; i = next++) {
            batch.trials[static_cast<std::size_t>(i)] =
                run_trial(scenario, first_seed + static_cast<std::uint64_t>(i));
        }
    };
    const int threads = std::clamp(jobs, 1, n_seeds);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    }
    batch.summary = summarize(batch.trials);
    return batch;
}

std::map<ResamplerKind, BatchResult> run_sweep(const Scenario& scenario, std::uint64_t first_seed,
                                               int n_seeds, int jobs) {
    std::map<ResamplerKind, BatchResult> out;
    for (auto kind : kAllResamplers) {
        Scenario variant = scenario;
        variant.config.filter.resampler = kind;
        out.emplace(kind, run_batch(variant, first_seed, n_seeds, jobs));
    }
    return out;
}

namespace {

std::size_t common_length(const BatchResult& batch) {
    std::size_t len = std::numeric_limits<std::size_t>::max();
    for (const auto& t : batch.trials) len = std::min(len, t.steps.size());
    return batch.trials.empty() ? 0 : len;
}

}  // namespace

double uncertainty_trace_variance(const BatchResult& batch) {
    const std::size_t len = common_length(batch);
    if (len == 0) return 0.0;
    double total = 0.0;
    std::vector<double> column(batch.trials.size());
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t s = 0; s < batch.trials.size(); ++s) {
            column[s] = batch.trials[s].steps[t].metrics.sqrt_lambda_max;
        }
        const MeanStd ms = mean_std(column);
        total += ms.stddev * ms.stddev;
    }
    return total / static_cast<double>(len);
}

std::vector<double> mean_trace(const BatchResult& batch, double StepMetrics::*field) {
    const std::size_t len = common_length(batch);
    std::vector<double> out(len, 0.0);
    for (const auto& trial : batch.trials) {
        for (std::size_t t = 0; t < len; ++t) out[t] += trial.steps[t].metrics.*field;
    }
    for (double& v : out) v /= static_cast<double>(batch.trials.size());
    return out;
}

std::string format_metrics_csv(const TrialResult& trial) {
    std::string out(kMetricsHeader);
    out += '\n';
    for (const auto& r : trial.steps) {
        out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", r.step, r.gt.x,
                           r.gt.y, r.mu.x, r.mu.y, r.metrics.gt_error, r.metrics.sqrt_lambda_max,
                           r.metrics.mahalanobis, r.metrics.n_eff, r.metrics.resampled ? 1 : 0);
    }
    return out;
}

std::string format_summary_csv(const RunSummary& s) {
    std::string out =
        "seed,initial_error_m,final_error_m,final_sqrt_lambda_max_m,final_mahalanobis,failed\n";
    for (std::size_t i = 0; i < s.seeds.size(); ++i) {
        out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", s.seeds[i], s.initial_error[i],
                           s.final_error[i], s.final_uncertainty[i], s.final_mahalanobis[i],
                           s.failed[i] ? 1 : 0);
    }
    out += fmt::format("mean,{:.6f},{:.6f},{:.6f},{:.6f},{}\n", s.initial.mean, s.error.mean,
                       s.uncertainty.mean, s.mahalanobis.mean, s.failed_count());
    out += fmt::format("std,{:.6f},{:.6f},{:.6f},{:.6f},\n", s.initial.stddev, s.error.stddev,
                       s.uncertainty.stddev, s.mahalanobis.stddev);
    return out;
}

std::string format_state_json(const FilterState& state) {
    std::string out = fmt::format("{{\"step\":{},\"particles\":[", state.step);
    for (std::size_t i = 0; i < state.particles.size(); ++i) {
        const auto& p = state.particles[i];
        out += fmt::format("{}{{\"x\":{:.17g},\"y\":{:.17g},\"log_w\":{:.17g}}}", i == 0 ? "" : ",",
                           p.position.x, p.position.y, p.log_weight);
    }
    out += fmt::format("],\"n_eff\":{:.17g},\"resampled\":{}}}", state.last_n_eff,
                       state.last_resampled ? "true" : "false");
    return out;
}

std::string format_sweep_csv(const std::map<ResamplerKind, BatchResult>& sweep) {
    std::string out =
        "resampler,final_error_mean_m,final_error_std_m,final_sqrt_lambda_max_mean_m,"
        "final_sqrt_lambda_max_std_m,uncertainty_trace_variance_m2,failed\n";
    for (const auto& [kind, batch] : sweep) {
        const auto& s = batch.summary;
        out += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", to_string(kind), s.error.mean,
                           s.error.stddev, s.uncertainty.mean, s.uncertainty.stddev,
                           uncertainty_trace_variance(batch), s.failed_count());
    }
    return out;
}

MetricsTable parse_metrics_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line.empty()) throw SchemaError("metrics CSV is empty");
    if (line.back() == '\r') line.pop_back();

    std::unordered_map<std::string, std::size_t> column;
    {
        std::istringstream hs(line);
        std::string name;
        for (std::size_t i = 0; std::getline(hs, name, ','); ++i) column[name] = i;
    }
    for (const char* required : {"step", "gt_error_m", "sqrt_lambda_max_m"}) {
        if (!column.count(required)) throw SchemaError(fmt::format("metrics CSV lacks column '{}'", required));
    }
    const std::size_t c_step = column["step"], c_err = column["gt_error_m"], c_unc = column["sqrt_lambda_max_m"];

    MetricsTable table;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream rs(line);
        std::string cell;
        while (std::getline(rs, cell, ',')) cells.push_back(cell);
        if (cells.size() < column.size()) throw SchemaError(fmt::format("metrics CSV line {} is short", lineno));
        try {
            table.step.push_back(std::stol(cells[c_step]));
            table.gt_error.push_back(std::stod(cells[c_err]));
            table.uncertainty.push_back(std::stod(cells[c_unc]));
        } catch (const std::exception&) {
            throw SchemaError(fmt::format("metrics CSV line {} has a malformed number", lineno));
        }
    }
    if (table.step.empty()) throw SchemaError("metrics CSV has no rows");
    return table;
}

std::vector<SvgFile> emit_plots(std::string_view metrics_csv) {
    const MetricsTable table = parse_metrics_csv(metrics_csv);
    std::vector<double> x(table.step.begin(), table.step.end());
    std::vector<SvgFile> out;
    out.push_back({"gt_error.svg", svg::render(svg::LinePlot{
                                       "Ground truth error", "step", "error (m)",
                                       {{"gt_error", x, table.gt_error}}})});
    out.push_back({"uncertainty.svg", svg::render(svg::LinePlot{
                                          "Filter uncertainty", "step", "sqrt(lambda_max) (m)",
                                          {{"sqrt_lambda_max", x, table.uncertainty}}})});
    return out;
}

namespace {

std::vector<double> step_axis(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
    return x;
}

}  // namespace

std::vector<SvgFile> batch_plots(const BatchResult& batch) {
    std::vector<SvgFile> out;
    out.push_back({"final_error_hist.svg",
                   svg::render(svg::Histogram{"Final ground truth error", "error (m)",
                                              batch.summary.final_error, 10})});
    const auto err = mean_trace(batch, &StepMetrics::gt_error);
    const auto unc = mean_trace(batch, &StepMetrics::sqrt_lambda_max);
    const auto x = step_axis(err.size());
    out.push_back({"mean_traces.svg", svg::render(svg::LinePlot{
                                          "Mean over seeds", "step", "meters",
                                          {{"gt_error", x, err}, {"sqrt_lambda_max", x, unc}}})});
    return out;
}

std::vector<SvgFile> sweep_plots(const std::map<ResamplerKind, BatchResult>& sweep) {
    svg::LinePlot err_plot{"Ground truth error by resampler", "step", "mean error (m)", {}};
    svg::LinePlot unc_plot{"Filter uncertainty by resampler", "step", "mean sqrt(lambda_max) (m)", {}};
    for (const auto& [kind, batch] : sweep) {
        const auto err = mean_trace(batch, &StepMetrics::gt_error);
        const auto unc = mean_trace(batch, &StepMetrics::sqrt_lambda_max);
        const auto x = step_axis(err.size());
        err_plot.series.push_back({std::string(to_string(kind)), x, err});
        unc_plot.series.push_back({std::string(to_string(kind)), x, unc});
    }
    return {{"sweep_gt_error.svg", svg::render(err_plot)}, {"sweep_uncertainty.svg", svg::render(unc_plot)}};
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError(fmt::format("cannot write '{}'", path.string()));
    out << content;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace craterloc
