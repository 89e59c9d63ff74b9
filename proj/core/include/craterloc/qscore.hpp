// Q-Score measurement likelihood.
//
// Each rover-frame edge observation is placed in the world using the
// hypothesised position and the known heading, and its distance to the
// nearest mapped rim is accumulated into Q_inc (seeded with epsilon). The
// score is min(1, m / Q_inc): a mean rim distance of 1 m or less earns the
// maximum score of 1.

#pragma once

#include <optional>
#include <span>

#include "craterloc/world.hpp"

namespace craterloc {

struct QScoreConfig {
    double epsilon{1e-6};  ///< meters; keeps the reciprocal finite

    /// Throws ConfigError.
    void validate() const;
};

/// Score in (0, 1], or nullopt when there are no observations.
/// Throws MapError on an empty map.
[[nodiscard]] std::optional<double> q_score(const Vec2& belief, double heading,
                                            std::span<const EdgeObservation> observations,
                                            const OrbitalMap& map, const QScoreConfig& cfg = {});

/// Natural log of q_score; exactly 0 when the score clamps to 1.
[[nodiscard]] std::optional<double> log_q_score(const Vec2& belief, double heading,
                                                std::span<const EdgeObservation> observations,
                                                const OrbitalMap& map,
                                                const QScoreConfig& cfg = {});

}  // namespace craterloc
