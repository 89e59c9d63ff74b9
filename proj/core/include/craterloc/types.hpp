// Basic value types shared by every module: planar vectors and the
// exception hierarchy.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace craterloc {

/// Planar vector in meters. World-frame points use (x = east, y = north).
struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2& operator+=(const Vec2& o) noexcept { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) noexcept { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) noexcept { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) noexcept { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) noexcept { return a -= b; }
    friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return a *= s; }
    friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return a *= s; }
    friend constexpr Vec2 operator-(const Vec2& a) noexcept { return {-a.x, -a.y}; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

    [[nodiscard]] double norm() const noexcept { return std::hypot(x, y); }
    [[nodiscard]] constexpr double squared_norm() const noexcept { return x * x + y * y; }
    [[nodiscard]] constexpr double dot(const Vec2& o) const noexcept { return x * o.x + y * o.y; }
};

[[nodiscard]] inline double distance(const Vec2& a, const Vec2& b) noexcept {
    return (a - b).norm();
}

/// Counter-clockwise rotation of `v` by `angle` radians.
[[nodiscard]] inline Vec2 rotate(const Vec2& v, double angle) noexcept {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
[[nodiscard]] inline double normalize_angle(double angle) noexcept {
    double a = std::remainder(angle, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The orbital map is empty or malformed.
class MapError : public Error {
public:
    using Error::Error;
};

/// A configuration value violates its invariant.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input file could not be read or parsed.
class LoadError : public Error {
public:
    using Error::Error;
};

/// A geometric query has no defined answer (e.g. front arc seen from the center).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Every particle weight is -inf or NaN; nothing can be normalized.
class WeightCollapseError : public Error {
public:
    using Error::Error;
};

/// A metrics CSV lacks required columns or rows.
class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace craterloc
