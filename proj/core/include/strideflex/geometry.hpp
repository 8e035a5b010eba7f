#pragma once

#include <cmath>
#include <numbers>

namespace strideflex {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

constexpr double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }
constexpr double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }

/// Wraps an angle in degrees into (-180, 180].
inline double wrap_deg(double d) {
    double w = std::fmod(d, 360.0);
    if (w <= -180.0) {
        w += 360.0;
    } else if (w > 180.0) {
        w -= 360.0;
    }
    return w;
}

/// Counter-clockwise rotation from a to b, degrees in (-180, 180].
inline double signed_angle_deg(Vec2 a, Vec2 b) {
    const double a_deg = rad_to_deg(std::atan2(cross(a, b), dot(a, b)));
    return a_deg == -180.0 ? 180.0 : a_deg;
}

inline Vec2 rotate(Vec2 v, double radians) {
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

} // namespace strideflex
