// Experiment configuration: one JSON document plus dotted CLI overrides.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "craterloc/filter.hpp"
#include "craterloc/motion.hpp"
#include "craterloc/qscore.hpp"
#include "craterloc/sensing.hpp"

namespace craterloc {

struct ExperimentConfig {
    std::string name{"experiment"};  ///< run-id prefix; the config file stem when loaded from disk
    std::filesystem::path map_path;
    std::filesystem::path trajectory_path;
    std::optional<std::filesystem::path> observation_log_path;
    std::filesystem::path output_dir{"out"};
    int n_seeds{25};
    std::uint64_t seed{0};  ///< first seed of a batch; single-run default
    /// Sigma of the true start about the filter's prior mean. Defaults to
    /// filter.init_sigma, i.e. the truth is a draw from the prior.
    std::optional<double> init_offset_sigma;
    bool perfect{false};

    FilterConfig filter;
    MotionConfig motion;
    SensorConfig sensor;
    QScoreConfig qscore;

    /// Throws ConfigError.
    void validate() const;
    [[nodiscard]] double effective_init_offset_sigma() const noexcept {
        return init_offset_sigma.value_or(filter.init_sigma);
    }
};

/// `--filter.n-particles 50` style overrides, already split into
/// (dotted key, raw value). Dashes in keys map to underscores.
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Relative paths resolve against `base_dir`. Throws ConfigError.
[[nodiscard]] ExperimentConfig parse_experiment_config(std::string_view json_text,
                                                       const std::filesystem::path& base_dir,
                                                       const Overrides& overrides = {});
[[nodiscard]] ExperimentConfig load_experiment_config(const std::filesystem::path& path,
                                                      const Overrides& overrides = {});

/// Canonical JSON rendering (paths as given, all fields present).
[[nodiscard]] std::string to_json(const ExperimentConfig& cfg);

/// Sensor settings with noise, detection loss and false positives removed.
[[nodiscard]] SensorConfig perfect_sensor(SensorConfig cfg) noexcept;

}  // namespace craterloc
