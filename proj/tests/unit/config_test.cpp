#include <gtest/gtest.h>

#include "craterloc/experiment_config.hpp"

namespace craterloc {
namespace {

constexpr const char* kMinimal = R"({"map_path": "maps/m.json", "trajectory_path": "/abs/t.csv"})";

TEST(ExperimentConfig, DefaultsAndPathResolution) {
    const ExperimentConfig cfg = parse_experiment_config(kMinimal, "/base/dir");
    EXPECT_EQ(cfg.map_path, std::filesystem::path("/base/dir/maps/m.json"));
    EXPECT_EQ(cfg.trajectory_path, std::filesystem::path("/abs/t.csv"));
    EXPECT_EQ(cfg.output_dir, std::filesystem::path("/base/dir/out"));
    EXPECT_EQ(cfg.n_seeds, 25);
    EXPECT_EQ(cfg.filter.n_particles, 100);
    EXPECT_DOUBLE_EQ(cfg.filter.n_eff_threshold, 50.0);
    EXPECT_DOUBLE_EQ(cfg.filter.init_sigma, 3.0);
    EXPECT_EQ(cfg.filter.resampler, ResamplerKind::systematic);
    EXPECT_DOUBLE_EQ(cfg.motion.drift_fraction, 0.02);
    EXPECT_DOUBLE_EQ(cfg.sensor.max_range, 20.0);
    EXPECT_DOUBLE_EQ(cfg.sensor.full_detect_range, 10.0);
    EXPECT_DOUBLE_EQ(cfg.sensor.arc_fraction_at_full, 0.8);
    EXPECT_NEAR(cfg.sensor.fov_half_angle, 35.0 * kPi / 180.0, 1e-15);
    EXPECT_DOUBLE_EQ(cfg.sensor.range_noise_sigma_fraction, 0.01);
    EXPECT_DOUBLE_EQ(cfg.sensor.false_positive_rate, 0.2);
    EXPECT_DOUBLE_EQ(cfg.sensor.arc_sample_spacing, 0.25);
    EXPECT_DOUBLE_EQ(cfg.qscore.epsilon, 1e-6);
    EXPECT_DOUBLE_EQ(cfg.effective_init_offset_sigma(), 3.0);
    EXPECT_FALSE(cfg.observation_log_path.has_value());
}

TEST(ExperimentConfig, DottedOverridesWithDashes) {
    const Overrides ov{{"filter.n-particles", "50"},
                       {"filter.n_eff_threshold", "25"},
                       {"filter.resampler", "residual"},
                       {"sensor.back-rim", "true"},
                       {"seed", "9"},
                       {"output_dir", "elsewhere"}};
    const ExperimentConfig cfg = parse_experiment_config(kMinimal, "/b", ov);
    EXPECT_EQ(cfg.filter.n_particles, 50);
    EXPECT_DOUBLE_EQ(cfg.filter.n_eff_threshold, 25.0);
    EXPECT_EQ(cfg.filter.resampler, ResamplerKind::residual);
    EXPECT_TRUE(cfg.sensor.back_rim);
    EXPECT_EQ(cfg.seed, 9u);
    EXPECT_EQ(cfg.output_dir, std::filesystem::path("/b/elsewhere"));
}

TEST(ExperimentConfig, RejectsBadInput) {
    EXPECT_THROW((void)parse_experiment_config("not json", "/"), ConfigError);
    EXPECT_THROW((void)parse_experiment_config("[]", "/"), ConfigError);
    EXPECT_THROW((void)parse_experiment_config(R"({"map_path": "m"})", "/"), ConfigError);
    EXPECT_THROW((void)parse_experiment_config(kMinimal, "/", {{"bogus", "1"}}), ConfigError);
    EXPECT_THROW((void)parse_experiment_config(kMinimal, "/", {{"filter.bogus", "1"}}), ConfigError);
    EXPECT_THROW((void)parse_experiment_config(kMinimal, "/", {{"filter.n_particles", "many"}}), ConfigError);
    EXPECT_THROW((void)parse_experiment_config(kMinimal, "/", {{"filter.resampler", "roulette"}}), ConfigError);
    EXPECT_THROW((void)parse_experiment_config(kMinimal, "/", {{"n_seeds", "0"}}), ConfigError);
    EXPECT_THROW((void)parse_experiment_config(kMinimal, "/", {{"filter.n_eff_threshold", "101"}}), ConfigError);
    EXPECT_THROW((void)parse_experiment_config(kMinimal, "/", {{"motion.drift_fraction", "-1"}}), ConfigError);
    EXPECT_THROW((void)parse_experiment_config(kMinimal, "/", {{"qscore.epsilon", "0"}}), ConfigError);
    EXPECT_THROW((void)parse_experiment_config(kMinimal, "/", {{"sensor", "3"}}), ConfigError);
    EXPECT_THROW((void)load_experiment_config("/nonexistent/config.json"), ConfigError);
}

TEST(ExperimentConfig, DisabledSensorNeedsNoDetectRange) {
    const ExperimentConfig cfg = parse_experiment_config(kMinimal, "/", {{"sensor.max_range", "0"}});
    EXPECT_FALSE(cfg.sensor.enabled());
}

TEST(ExperimentConfig, CanonicalJsonRoundTrips) {
    const Overrides ov{{"filter.resampler", "stratified"}, {"sensor.false_positive_rate", "0.7"},
                       {"observation_log_path", "obs.csv"}, {"init_offset_sigma", "1.5"}};
    const ExperimentConfig a = parse_experiment_config(kMinimal, "/x", ov);
    const ExperimentConfig b = parse_experiment_config(to_json(a), "/elsewhere");
    EXPECT_EQ(to_json(a), to_json(b));
    EXPECT_EQ(b.filter.resampler, ResamplerKind::stratified);
    EXPECT_EQ(*b.observation_log_path, std::filesystem::path("/x/obs.csv"));
    EXPECT_DOUBLE_EQ(b.effective_init_offset_sigma(), 1.5);
}

TEST(ExperimentConfig, BundledConfigsLoad) {
    for (const char* name : {"traj1", "traj2", "traj3", "dead_reckoning"}) {
        const auto path = std::filesystem::path(CRATERLOC_SOURCE_DIR) / "configs" / (std::string(name) + ".json");
        const ExperimentConfig cfg = load_experiment_config(path);
        EXPECT_EQ(cfg.name, name);
        EXPECT_TRUE(std::filesystem::exists(cfg.map_path)) << name;
        EXPECT_TRUE(std::filesystem::exists(cfg.trajectory_path)) << name;
    }
}

TEST(PerfectSensor, StripsNoiseAndLoss) {
    SensorConfig in;
    in.back_rim = true;
    const SensorConfig out = perfect_sensor(in);
    EXPECT_EQ(out.range_noise_sigma_fraction, 0.0);
    EXPECT_EQ(out.false_positive_rate, 0.0);
    EXPECT_TRUE(out.detect_all);
    EXPECT_FALSE(out.back_rim);
    EXPECT_EQ(out.max_range, in.max_range);
}

}  // namespace
}  // namespace craterloc
