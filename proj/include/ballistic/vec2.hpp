#pragma once

#include <cmath>

namespace ballistic {

constexpr double pi = 3.14159265358979323846;
constexpr double two_pi = 2.0 * pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    bool operator==(const Vec2&) const = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

/// Rotate by +90 degrees (counterclockwise).
inline Vec2 perp_ccw(Vec2 a) { return {-a.y, a.x}; }
/// Rotate by -90 degrees; for a CCW polygon this maps an edge direction to
/// its outward normal.
inline Vec2 perp_cw(Vec2 a) { return {a.y, -a.x}; }

inline Vec2 normalized(Vec2 a) {
    double n = norm(a);
    return {a.x / n, a.y / n};
}

inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Wrap an angle into [0, 2pi).
inline double wrap_angle(double a) {
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    return a;
}

/// Direction angle in [0, 2pi).
inline double angle_of(Vec2 a) { return wrap_angle(std::atan2(a.y, a.x)); }

/// Signed CCW angle from a to b, in (-pi, pi].
inline double signed_angle(Vec2 a, Vec2 b) { return std::atan2(cross(a, b), dot(a, b)); }

} // namespace ballistic
