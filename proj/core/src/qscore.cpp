#include "craterloc/qscore.hpp"

#include <algorithm>

namespace craterloc {

void QScoreConfig::validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("qscore.epsilon must be > 0");
}

std::optional<double> q_score(const Vec2& belief, double heading,
                              std::span<const EdgeObservation> observations,
                              const OrbitalMap& map, const QScoreConfig& cfg) {
    if (map.empty()) throw MapError("q_score needs a non-empty map");
    if (observations.empty()) return std::nullopt;

    const double c = std::cos(heading);
    const double s = std::sin(heading);
    double q_inc = cfg.epsilon;
    for (const auto& obs : observations) {
        const Vec2 world{belief.x + c * obs.forward - s * obs.left,
                         belief.y + s * obs.forward + c * obs.left};
        q_inc += nearest_rim_distance(world, map);
    }
    const double m = static_cast<double>(observations.size());
    return std::min(1.0, m / q_inc);
}

std::optional<double> log_q_score(const Vec2& belief, double heading,
                                  std::span<const EdgeObservation> observations,
                                  const OrbitalMap& map, const QScoreConfig& cfg) {
    const auto score = q_score(belief, heading, observations, map, cfg);
    if (!score) return std::nullopt;
    return *score >= 1.0 ? 0.0 : std::log(*score);
}

}  // namespace craterloc
