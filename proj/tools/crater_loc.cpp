// crater-loc: experiment driver for crater-based particle filter localization.
//
//   crater-loc run --config <file> [--seed N] [--dump-state]
//   crater-loc batch --config <file> --seeds 25
//   crater-loc sweep-resamplers --config <file>
//   crater-loc plot <metrics.csv>
//
// Any config field can be overridden with its dotted name, e.g.
// `--filter.n-particles 200` or `--sensor.false-positive-rate=0`.

#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "craterloc/experiment_config.hpp"
#include "craterloc/harness.hpp"

namespace fs = std::filesystem;
using namespace craterloc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitTrialFailed = 3;

// Remaining `--section.key value` / `--section.key=value` tokens.
Overrides collect_overrides(const std::vector<std::string>& extras) {
    Overrides out;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& tok = extras[i];
        if (tok.rfind("--", 0) != 0 || tok.size() <= 2) {
            throw ConfigError(fmt::format("unrecognized argument '{}'", tok));
        }
        std::string key = tok.substr(2);
        if (const auto eq = key.find('='); eq != std::string::npos) {
            out.emplace_back(key.substr(0, eq), key.substr(eq + 1));
            continue;
        }
        if (i + 1 >= extras.size()) throw ConfigError(fmt::format("override '{}' needs a value", tok));
        out.emplace_back(key, extras[++i]);
    }
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Timestamps live only here so every other output stays byte-stable.
void write_metadata(const fs::path& dir, std::string_view command, const ExperimentConfig& cfg) {
    nlohmann::json meta;
    meta["command"] = command;
    meta["created_utc"] = utc_timestamp();
    meta["config"] = nlohmann::json::parse(to_json(cfg));
    write_text_file(dir / "meta.json", meta.dump(2) + "\n");
}

void write_svgs(const fs::path& dir, const std::vector<SvgFile>& files, std::string_view prefix = "") {
    for (const auto& f : files) write_text_file(dir / (std::string(prefix) + f.name), f.content);
}

int cmd_run(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed_opt, bool dump_state) {
    const Scenario scenario = load_scenario(cfg);
    const std::uint64_t seed = seed_opt.value_or(cfg.seed);
    const fs::path dir = cfg.output_dir / fmt::format("{}-run-seed{}", cfg.name, seed);
    fs::create_directories(dir);

    std::string states;
    ObservationLog observations;
    TrialHooks hooks;
    if (dump_state) {
        hooks.on_state = [&](const FilterState& s) { states += format_state_json(s) + "\n"; };
    }
    hooks.on_observations = [&](long t, const std::vector<EdgeObservation>& obs) {
        if (!obs.empty()) observations[t] = obs;
    };

    const TrialResult trial = run_trial(scenario, seed, hooks);
    const std::string metrics = format_metrics_csv(trial);
    const TrialResult trials[] = {trial};
    const RunSummary summary = summarize(trials);

    write_text_file(dir / "metrics.csv", metrics);
    write_text_file(dir / "summary.csv", format_summary_csv(summary));
    write_text_file(dir / "observations.csv", format_observation_log(observations));
    write_text_file(dir / "config.json", to_json(cfg) + "\n");
    if (dump_state) write_text_file(dir / "state.jsonl", states);
    write_svgs(dir, emit_plots(metrics));
    write_metadata(dir, "run", cfg);

    const auto& fin = trial.final().metrics;
    fmt::print("seed {}: steps={} final_error={:.3f} m uncertainty={:.3f} m mahalanobis={:.3f}{}\n", seed,
               trial.final().step, fin.gt_error, fin.sqrt_lambda_max, fin.mahalanobis,
               trial.failed ? " FAILED: " + trial.failure : "");
    fmt::print("outputs in {}\n", dir.string());
    return trial.failed ? kExitTrialFailed : kExitOk;
}

void print_summary(std::string_view label, const RunSummary& s) {
    fmt::print("{}: final error {:.2f} +/- {:.2f} m | uncertainty {:.2f} +/- {:.2f} m | "
               "mahalanobis {:.2f} +/- {:.2f} | initial error {:.2f} m | failed {}\n",
               label, s.error.mean, s.error.stddev, s.uncertainty.mean, s.uncertainty.stddev,
               s.mahalanobis.mean, s.mahalanobis.stddev, s.initial.mean, s.failed_count());
}

int cmd_batch(const ExperimentConfig& cfg, int n_seeds, int jobs) {
    const Scenario scenario = load_scenario(cfg);
    const fs::path dir = cfg.output_dir / fmt::format("{}-batch-seed{}-n{}", cfg.name, cfg.seed, n_seeds);
    const BatchResult batch = run_batch(scenario, cfg.seed, n_seeds, jobs);

    write_text_file(dir / "summary.csv", format_summary_csv(batch.summary));
    for (const auto& t : batch.trials) {
        write_text_file(dir / "seeds" / fmt::format("seed{}_metrics.csv", t.seed), format_metrics_csv(t));
    }
    write_svgs(dir, batch_plots(batch));
    write_metadata(dir, "batch", cfg);

    print_summary("batch", batch.summary);
    fmt::print("outputs in {}\n", dir.string());
    return batch.summary.failed_count() > 0 ? kExitTrialFailed : kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, int n_seeds, int jobs) {
    const Scenario scenario = load_scenario(cfg);
    const fs::path dir = cfg.output_dir / fmt::format("{}-sweep-seed{}-n{}", cfg.name, cfg.seed, n_seeds);
    const auto sweep = run_sweep(scenario, cfg.seed, n_seeds, jobs);

    int failed = 0;
    write_text_file(dir / "sweep.csv", format_sweep_csv(sweep));
    for (const auto& [kind, batch] : sweep) {
        const std::string name(to_string(kind));
        write_text_file(dir / fmt::format("summary_{}.csv", name), format_summary_csv(batch.summary));
        write_svgs(dir, batch_plots(batch), name + "_");
        print_summary(name, batch.summary);
        fmt::print("{}: uncertainty trace variance {:.4f} m^2\n", name, uncertainty_trace_variance(batch));
        failed += batch.summary.failed_count();
    }
    write_svgs(dir, sweep_plots(sweep));
    write_metadata(dir, "sweep-resamplers", cfg);
    fmt::print("outputs in {}\n", dir.string());
    return failed > 0 ? kExitTrialFailed : kExitOk;
}

int cmd_plot(const fs::path& csv) {
    const std::string text = read_text_file(csv);
    const auto files = emit_plots(text);
    const fs::path dir = csv.has_parent_path() ? csv.parent_path() : fs::path(".");
    const std::string stem = csv.stem().string();
    for (const auto& f : files) {
        const fs::path out = dir / (stem + "_" + f.name);
        write_text_file(out, f.content);
        fmt::print("wrote {}\n", out.string());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crater-rim particle filter localization experiments"};
    app.require_subcommand(1);

    fs::path config_path;
    std::optional<std::uint64_t> seed;
    bool dump_state = false;
    int seeds = 0;
    int jobs = 1;
    fs::path metrics_csv;

    auto* run = app.add_subcommand("run", "Run one trial");
    run->add_option("--config", config_path, "Experiment JSON")->required();
    run->add_option("--seed", seed, "Trial seed (default: config seed)");
    run->add_flag("--dump-state", dump_state, "Write per-step particle snapshots to state.jsonl");
    run->allow_extras();

    auto* batch = app.add_subcommand("batch", "Monte Carlo batch over consecutive seeds");
    batch->add_option("--config", config_path, "Experiment JSON")->required();
    batch->add_option("--seeds", seeds, "Number of seeds (default: config n_seeds)");
    batch->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    batch->allow_extras();

    auto* sweep = app.add_subcommand("sweep-resamplers", "All four resamplers on shared seeds");
    sweep->add_option("--config", config_path, "Experiment JSON")->required();
    sweep->add_option("--seeds", seeds, "Number of seeds (default: config n_seeds)");
    sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sweep->allow_extras();

    auto* plot = app.add_subcommand("plot", "Render SVG traces from a metrics CSV");
    plot->add_option("metrics", metrics_csv, "metrics.csv")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (plot->parsed()) return cmd_plot(metrics_csv);

        CLI::App* active = run->parsed() ? run : batch->parsed() ? batch : sweep;
        const ExperimentConfig cfg = load_experiment_config(config_path, collect_overrides(active->remaining()));
        const int n = seeds > 0 ? seeds : cfg.n_seeds;
        if (run->parsed()) return cmd_run(cfg, seed, dump_state);
        if (batch->parsed()) return cmd_batch(cfg, n, jobs);
        return cmd_sweep(cfg, n, jobs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const LoadError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const MapError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
