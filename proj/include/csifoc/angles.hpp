#pragma once

#include <cmath>

namespace csifoc {

/// 2-vector used for both stationary (alpha/beta) and rotating (d/q) frame
/// quantities. Amplitude-invariant scaling throughout.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Wrap an angle to (-pi, pi].
inline double wrap_pi(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a <= 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

/// Wrap an angle to [0, 2*pi).
inline double wrap_2pi(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a;
}

/// Rotate a stationary-frame vector into a frame at angle theta (Park).
inline Vec2 park(const Vec2& ab, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * ab.x + s * ab.y, -s * ab.x + c * ab.y};
}

/// Rotate a frame-local vector back to the stationary frame (inverse Park).
inline Vec2 inverse_park(const Vec2& dq, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * dq.x - s * dq.y, s * dq.x + c * dq.y};
}

/// Three-phase quantities from an alpha/beta pair (amplitude-invariant
/// inverse Clarke).
struct Abc {
    double a, b, c;
};

inline Abc inverse_clarke(const Vec2& ab) {
    constexpr double half_sqrt3 = 0.86602540378443864676;
    return {ab.x, -0.5 * ab.x + half_sqrt3 * ab.y, -0.5 * ab.x - half_sqrt3 * ab.y};
}

constexpr double rad_s_to_rpm(double w) { return w * 60.0 / (2.0 * M_PI); }
constexpr double deg_from_rad(double a) { return a * 180.0 / M_PI; }
constexpr double rad_from_deg(double a) { return a * M_PI / 180.0; }

}  // namespace csifoc
