#pragma once

#include <cmath>

namespace lvc {

/// Point or vector in the plane.
struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x1 += o.x1; x2 += o.x2; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x1 -= o.x1; x2 -= o.x2; return *this; }
    constexpr Vec2& operator*=(double s) { x1 *= s; x2 *= s; return *this; }

    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x1, -a.x2}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x1, s * a.x2}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x1 * b.x2 - a.x2 * b.x1; }
inline double norm(Vec2 a) { return std::hypot(a.x1, a.x2); }
constexpr double norm_sq(Vec2 a) { return dot(a, a); }

// Rotation by -pi/2. Maps the tangent of a counterclockwise curve to its outward normal.
constexpr Vec2 rotate_cw(Vec2 a) { return {a.x2, -a.x1}; }

inline bool is_finite(Vec2 a) { return std::isfinite(a.x1) && std::isfinite(a.x2); }

}  // namespace lvc
