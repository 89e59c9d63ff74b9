// Parametric leading-edge crater detector. It reproduces a detection
// envelope (arc fraction vs range) instead of processing imagery.

#pragma once

#include <filesystem>
#include <map>
#include <string_view>
#include <vector>

#include "craterloc/rng.hpp"
#include "craterloc/world.hpp"

namespace craterloc {

struct SensorConfig {
    double max_range{20.0};                   ///< meters; 0 disables the sensor
    double full_detect_range{10.0};           ///< meters
    double arc_fraction_at_full{0.8};
    double fov_half_angle{35.0 * kPi / 180.0};  ///< radians
    double range_noise_sigma_fraction{0.01};
    double false_positive_rate{0.2};          ///< expected spurious points per frame
    double arc_sample_spacing{0.25};          ///< meters along the rim
    bool detect_all{false};                   ///< detection fraction forced to 1 inside max_range
    bool back_rim{false};                     ///< also emit far-rim points
    double back_rim_probability{0.25};        ///< scales detection fraction on the far rim

    [[nodiscard]] bool enabled() const noexcept { return max_range > 0.0; }

    /// Throws ConfigError.
    void validate() const;
};

/// Expected kept fraction of a front arc whose nearest rim point is `range` away.
[[nodiscard]] double detection_fraction(double range, const SensorConfig& cfg) noexcept;

/// Synthetic detections for one frame, in the rover frame.
[[nodiscard]] std::vector<EdgeObservation> observe(const Pose& true_pose, const OrbitalMap& map,
                                                   const SensorConfig& cfg, RngStream& rng);

/// Bearing of a rover-frame offset, radians from the forward axis.
[[nodiscard]] inline double bearing(const EdgeObservation& obs) noexcept {
    return std::atan2(obs.left, obs.forward);
}

/// Observations grouped by step index.
using ObservationLog = std::map<long, std::vector<EdgeObservation>>;

/// CSV `step,forward_m,left_m`. Throws LoadError.
[[nodiscard]] ObservationLog parse_observation_log(std::string_view text);
[[nodiscard]] ObservationLog load_observation_log(const std::filesystem::path& path);
[[nodiscard]] std::string format_observation_log(const ObservationLog& log);

}  // namespace craterloc
