#include "craterloc/world.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

namespace craterloc {

OrbitalMap::OrbitalMap(std::vector<Crater> craters) : craters_(std::move(craters)) {
    std::unordered_set<int> ids;
    for (const auto& c : craters_) {
        if (!(c.diameter > 0.0) || !std::isfinite(c.diameter)) {
            throw MapError(fmt::format("crater {}: diameter must be > 0", c.id));
        }
        if (!(c.depth > 0.0) || !std::isfinite(c.depth)) {
            throw MapError(fmt::format("crater {}: depth must be > 0", c.id));
        }
        if (!std::isfinite(c.center.x) || !std::isfinite(c.center.y)) {
            throw MapError(fmt::format("crater {}: non-finite center", c.id));
        }
        if (!ids.insert(c.id).second) {
            throw MapError(fmt::format("duplicate crater id {}", c.id));
        }
    }
    if (craters_.empty()) return;
    const double inf = std::numeric_limits<double>::infinity();
    bounds_ = {{inf, inf}, {-inf, -inf}};
    for (const auto& c : craters_) {
        const double r = c.radius();
        bounds_.min.x = std::min(bounds_.min.x, c.center.x - r);
        bounds_.min.y = std::min(bounds_.min.y, c.center.y - r);
        bounds_.max.x = std::max(bounds_.max.x, c.center.x + r);
        bounds_.max.y = std::max(bounds_.max.y, c.center.y + r);
    }
}

const Crater& OrbitalMap::by_id(int id) const {
    auto it = std::find_if(craters_.begin(), craters_.end(),
                           [id](const Crater& c) { return c.id == id; });
    if (it == craters_.end()) throw MapError(fmt::format("no crater with id {}", id));
    return *it;
}

OrbitalMap parse_map_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw LoadError(fmt::format("map: invalid JSON: {}", e.what()));
    }
    if (!doc.is_array()) throw LoadError("map: expected a JSON array of craters");

    std::vector<Crater> craters;
    craters.reserve(doc.size());
    for (const auto& item : doc) {
        try {
            Crater c;
            c.id = item.at("id").get<int>();
            c.center = {item.at("x_m").get<double>(), item.at("y_m").get<double>()};
            c.diameter = item.at("diameter_m").get<double>();
            c.depth = item.at("depth_m").get<double>();
            craters.push_back(c);
        } catch (const nlohmann::json::exception& e) {
            throw LoadError(fmt::format("map: bad crater entry {}: {}", item.dump(), e.what()));
        }
    }
    return OrbitalMap(std::move(craters));
}

OrbitalMap load_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(fmt::format("cannot open map file '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_map_json(ss.str());
}

Vec2 rover_to_world(const Pose& pose, const EdgeObservation& obs) noexcept {
    return pose.position + rotate(obs.offset(), pose.heading);
}

EdgeObservation world_to_rover(const Pose& pose, const Vec2& p) noexcept {
    const Vec2 local = rotate(p - pose.position, -pose.heading);
    return {local.x, local.y};
}

RimHit nearest_rim(const Vec2& p, const OrbitalMap& map) {
    if (map.empty()) throw MapError("nearest rim query on an empty map");
    const auto craters = map.craters();
    RimHit best{0, rim_distance(p, craters[0])};
    for (std::size_t i = 1; i < craters.size(); ++i) {
        const double d = rim_distance(p, craters[i]);
        if (d < best.distance || (d == best.distance && craters[i].id < craters[best.index].id)) {
            best = {i, d};
        }
    }
    return best;
}

double nearest_rim_distance(const Vec2& p, const OrbitalMap& map) {
    return nearest_rim(p, map).distance;
}

bool Arc::contains(double rim_angle) const noexcept {
    return std::abs(normalize_angle(rim_angle - center_angle)) <= half_width + 1e-12;
}

Arc front_arc(const Pose& pose, const Crater& crater) {
    const Vec2 d = pose.position - crater.center;
    if (d.x == 0.0 && d.y == 0.0) {
        throw GeometryError(fmt::format("front arc of crater {} undefined from its center", crater.id));
    }
    return Arc{std::atan2(d.y, d.x), kPi / 2.0};
}

Arc back_arc(const Pose& pose, const Crater& crater) {
    const Arc front = front_arc(pose, crater);
    return Arc{normalize_angle(front.center_angle + kPi), front.half_width};
}

Vec2 rim_point(const Crater& crater, double rim_angle) noexcept {
    return crater.center + Vec2{std::cos(rim_angle), std::sin(rim_angle)} * crater.radius();
}

std::vector<Vec2> sample_arc(const Crater& crater, const Arc& arc, double spacing) {
    if (!(spacing > 0.0)) throw std::invalid_argument("arc sample spacing must be > 0");
    const double length = 2.0 * arc.half_width * crater.radius();
    const auto intervals = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / spacing - 1e-9)));
    std::vector<Vec2> out;
    out.reserve(intervals + 1);
    const double step = 2.0 * arc.half_width / static_cast<double>(intervals);
    for (std::size_t k = 0; k <= intervals; ++k) {
        out.push_back(rim_point(crater, arc.start() + step * static_cast<double>(k)));
    }
    return out;
}

}  // namespace craterloc
