// Orbital crater map, rover/world frames and rim geometry.

#pragma once

#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "craterloc/types.hpp"

namespace craterloc {

struct Crater {
    int id{0};
    Vec2 center;
    double diameter{1.0};  ///< meters
    double depth{1.0};     ///< meters; carried as metadata, never scored

    [[nodiscard]] double radius() const noexcept { return 0.5 * diameter; }
};

struct Bounds {
    Vec2 min;
    Vec2 max;

    [[nodiscard]] bool contains(const Vec2& p) const noexcept {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
};

/// Immutable set of craters. Safe for concurrent reads.
class OrbitalMap {
public:
    OrbitalMap() = default;

    /// Validates diameters, depths and id uniqueness; throws MapError.
    explicit OrbitalMap(std::vector<Crater> craters);

    [[nodiscard]] std::span<const Crater> craters() const noexcept { return craters_; }
    [[nodiscard]] bool empty() const noexcept { return craters_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return craters_.size(); }
    [[nodiscard]] const Bounds& bounds() const noexcept { return bounds_; }

    /// Throws MapError if no crater has this id.
    [[nodiscard]] const Crater& by_id(int id) const;

private:
    std::vector<Crater> craters_;
    Bounds bounds_{};
};

/// Parses `[{"id":..,"x_m":..,"y_m":..,"diameter_m":..,"depth_m":..}, ...]`.
[[nodiscard]] OrbitalMap parse_map_json(std::string_view text);
[[nodiscard]] OrbitalMap load_map(const std::filesystem::path& path);

struct Pose {
    Vec2 position;
    double heading{0.0};  ///< radians, (-pi, pi], counter-clockwise from +x

    Pose() = default;
    Pose(Vec2 p, double h) : position(p), heading(normalize_angle(h)) {}
};

/// A detected leading-edge point in the rover frame.
struct EdgeObservation {
    double forward{0.0};  ///< meters along the heading
    double left{0.0};     ///< meters to the left of the heading

    [[nodiscard]] Vec2 offset() const noexcept { return {forward, left}; }
    [[nodiscard]] double range() const noexcept { return offset().norm(); }
    friend constexpr bool operator==(const EdgeObservation&, const EdgeObservation&) = default;
};

[[nodiscard]] Vec2 rover_to_world(const Pose& pose, const EdgeObservation& obs) noexcept;
[[nodiscard]] EdgeObservation world_to_rover(const Pose& pose, const Vec2& p) noexcept;

/// Distance from `p` to the circle of crater `c`.
[[nodiscard]] inline double rim_distance(const Vec2& p, const Crater& c) noexcept {
    return std::abs(distance(p, c.center) - c.radius());
}

struct RimHit {
    std::size_t index{0};  ///< position of the crater in OrbitalMap::craters()
    double distance{0.0};
};

/// Closest rim over the whole map; ties keep the lower crater id.
/// Throws MapError on an empty map.
[[nodiscard]] RimHit nearest_rim(const Vec2& p, const OrbitalMap& map);
[[nodiscard]] double nearest_rim_distance(const Vec2& p, const OrbitalMap& map);

/// Half of a rim, as rim angles (measured at the crater center, CCW from +x)
/// in [center_angle - pi/2, center_angle + pi/2].
struct Arc {
    double center_angle{0.0};
    double half_width{kPi / 2.0};

    [[nodiscard]] double start() const noexcept { return center_angle - half_width; }
    [[nodiscard]] double end() const noexcept { return center_angle + half_width; }
    [[nodiscard]] bool contains(double rim_angle) const noexcept;
};

/// Rim half facing the rover. Throws GeometryError when the rover sits on the center.
[[nodiscard]] Arc front_arc(const Pose& pose, const Crater& crater);

/// Rim half facing away from the rover.
[[nodiscard]] Arc back_arc(const Pose& pose, const Crater& crater);

[[nodiscard]] Vec2 rim_point(const Crater& crater, double rim_angle) noexcept;

/// Closed-arc samples, endpoints included, spaced no more than `spacing`
/// meters apart along the rim.
[[nodiscard]] std::vector<Vec2> sample_arc(const Crater& crater, const Arc& arc, double spacing);

}  // namespace craterloc
