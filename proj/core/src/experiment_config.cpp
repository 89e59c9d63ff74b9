#include "craterloc/experiment_config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace craterloc {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, std::string_view where,
                         std::initializer_list<std::string_view> known) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError(fmt::format("unknown config key '{}{}'", where, key));
        }
    }
}

template <typename T>
void read(const json& obj, std::string_view key, T& out, std::string_view where) {
    auto it = obj.find(std::string(key));
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("config key '{}{}' has the wrong type", where, key));
    }
}

json section(const json& root, std::string_view name) {
    auto it = root.find(std::string(name));
    if (it == root.end()) return json::object();
    if (!it->is_object()) throw ConfigError(fmt::format("config section '{}' must be an object", name));
    return *it;
}

json parse_override_value(const std::string& raw) {
    json v = json::parse(raw, nullptr, false);
    if (v.is_discarded()) return json(raw);
    return v;
}

void apply_override(json& root, std::string key, const std::string& raw) {
    std::replace(key.begin(), key.end(), '-', '_');
    json* node = &root;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError(fmt::format("malformed override key '{}'", key));
        if (dot == std::string::npos) {
            (*node)[part] = parse_override_value(raw);
            return;
        }
        if (!node->contains(part)) (*node)[part] = json::object();
        node = &(*node)[part];
        if (!node->is_object()) throw ConfigError(fmt::format("override '{}' descends into a non-object", key));
        start = dot + 1;
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
    if (init_offset_sigma && !(*init_offset_sigma >= 0.0)) throw ConfigError("init_offset_sigma must be >= 0");
    filter.validate();
    motion.validate();
    sensor.validate();
    qscore.validate();
}

SensorConfig perfect_sensor(SensorConfig cfg) noexcept {
    cfg.range_noise_sigma_fraction = 0.0;
    cfg.false_positive_rate = 0.0;
    cfg.detect_all = true;
    cfg.back_rim = false;
    return cfg;
}

ExperimentConfig parse_experiment_config(std::string_view json_text,
                                         const std::filesystem::path& base_dir,
                                         const Overrides& overrides) {
    json root = json::parse(json_text, nullptr, false, true);
    if (root.is_discarded() || !root.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : overrides) apply_override(root, key, value);

    reject_unknown_keys(root, "", {"map_path", "trajectory_path", "observation_log_path", "output_dir",
                                   "n_seeds", "seed", "init_offset_sigma", "perfect", "filter",
                                   "motion", "sensor", "qscore"});

    ExperimentConfig cfg;
    std::string path;
    if (!root.contains("map_path")) throw ConfigError("config requires 'map_path'");
    if (!root.contains("trajectory_path")) throw ConfigError("config requires 'trajectory_path'");
    read(root, "map_path", path, "");
    cfg.map_path = resolve(base_dir, path);
    read(root, "trajectory_path", path, "");
    cfg.trajectory_path = resolve(base_dir, path);
    if (root.contains("observation_log_path")) {
        read(root, "observation_log_path", path, "");
        cfg.observation_log_path = resolve(base_dir, path);
    }
    if (root.contains("output_dir")) {
        read(root, "output_dir", path, "");
        cfg.output_dir = resolve(base_dir, path);
    } else {
        cfg.output_dir = resolve(base_dir, "out");
    }
    read(root, "n_seeds", cfg.n_seeds, "");
    read(root, "seed", cfg.seed, "");
    read(root, "perfect", cfg.perfect, "");
    if (root.contains("init_offset_sigma")) {
        double v = 0.0;
        read(root, "init_offset_sigma", v, "");
        cfg.init_offset_sigma = v;
    }

    const json filter = section(root, "filter");
    reject_unknown_keys(filter, "filter.", {"n_particles", "n_eff_threshold", "init_sigma", "resampler"});
    read(filter, "n_particles", cfg.filter.n_particles, "filter.");
    read(filter, "n_eff_threshold", cfg.filter.n_eff_threshold, "filter.");
    read(filter, "init_sigma", cfg.filter.init_sigma, "filter.");
    if (filter.contains("resampler")) {
        std::string name;
        read(filter, "resampler", name, "filter.");
        cfg.filter.resampler = parse_resampler(name);
    }

    const json motion = section(root, "motion");
    reject_unknown_keys(motion, "motion.", {"drift_fraction", "max_step", "heading_noise_sigma"});
    read(motion, "drift_fraction", cfg.motion.drift_fraction, "motion.");
    read(motion, "max_step", cfg.motion.max_step, "motion.");
    read(motion, "heading_noise_sigma", cfg.motion.heading_noise_sigma, "motion.");

    const json sensor = section(root, "sensor");
    reject_unknown_keys(sensor, "sensor.",
                        {"max_range", "full_detect_range", "arc_fraction_at_full", "fov_half_angle",
                         "range_noise_sigma_fraction", "false_positive_rate", "arc_sample_spacing",
                         "detect_all", "back_rim", "back_rim_probability"});
    read(sensor, "max_range", cfg.sensor.max_range, "sensor.");
    read(sensor, "full_detect_range", cfg.sensor.full_detect_range, "sensor.");
    read(sensor, "arc_fraction_at_full", cfg.sensor.arc_fraction_at_full, "sensor.");
    read(sensor, "fov_half_angle", cfg.sensor.fov_half_angle, "sensor.");
    read(sensor, "range_noise_sigma_fraction", cfg.sensor.range_noise_sigma_fraction, "sensor.");
    read(sensor, "false_positive_rate", cfg.sensor.false_positive_rate, "sensor.");
    read(sensor, "arc_sample_spacing", cfg.sensor.arc_sample_spacing, "sensor.");
    read(sensor, "detect_all", cfg.sensor.detect_all, "sensor.");
    read(sensor, "back_rim", cfg.sensor.back_rim, "sensor.");
    read(sensor, "back_rim_probability", cfg.sensor.back_rim_probability, "sensor.");

    const json qscore = section(root, "qscore");
    reject_unknown_keys(qscore, "qscore.", {"epsilon"});
    read(qscore, "epsilon", cfg.qscore.epsilon, "qscore.");

    if (cfg.sensor.enabled() && cfg.sensor.full_detect_range > cfg.sensor.max_range &&
        !sensor.contains("full_detect_range")) {
        cfg.sensor.full_detect_range = cfg.sensor.max_range;
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    ExperimentConfig cfg = parse_experiment_config(ss.str(), path.parent_path(), overrides);
    cfg.name = path.stem().string();
    return cfg;
}

std::string to_json(const ExperimentConfig& cfg) {
    json j;
    j["map_path"] = cfg.map_path.generic_string();
    j["trajectory_path"] = cfg.trajectory_path.generic_string();
    if (cfg.observation_log_path) j["observation_log_path"] = cfg.observation_log_path->generic_string();
    j["output_dir"] = cfg.output_dir.generic_string();
    j["n_seeds"] = cfg.n_seeds;
    j["seed"] = cfg.seed;
    j["init_offset_sigma"] = cfg.effective_init_offset_sigma();
    j["perfect"] = cfg.perfect;
    j["filter"] = {{"n_particles", cfg.filter.n_particles},
                   {"n_eff_threshold", cfg.filter.n_eff_threshold},
                   {"init_sigma", cfg.filter.init_sigma},
                   {"resampler", std::string(to_string(cfg.filter.resampler))}};
    j["motion"] = {{"drift_fraction", cfg.motion.drift_fraction},
                   {"max_step", cfg.motion.max_step},
                   {"heading_noise_sigma", cfg.motion.heading_noise_sigma}};
    j["sensor"] = {{"max_range", cfg.sensor.max_range},
                   {"full_detect_range", cfg.sensor.full_detect_range},
                   {"arc_fraction_at_full", cfg.sensor.arc_fraction_at_full},
                   {"fov_half_angle", cfg.sensor.fov_half_angle},
                   {"range_noise_sigma_fraction", cfg.sensor.range_noise_sigma_fraction},
                   {"false_positive_rate", cfg.sensor.false_positive_rate},
                   {"arc_sample_spacing", cfg.sensor.arc_sample_spacing},
                   {"detect_all", cfg.sensor.detect_all},
                   {"back_rim", cfg.sensor.back_rim},
                   {"back_rim_probability", cfg.sensor.back_rim_probability}};
    j["qscore"] = {{"epsilon", cfg.qscore.epsilon}};
    return j.dump(2);
}

}  // namespace craterloc
