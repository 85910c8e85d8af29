#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

namespace scatter2d {

using cdouble = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Point in the plane; used both for spatial nodes and frequency-mesh points.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 operator-() const { return {-x, -y}; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }
    bool is_zero() const { return x == 0.0 && y == 0.0; }

    Vec2 normalized() const {
        const double n = norm();
        return {x / n, y / n};
    }

    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Counterclockwise rotation by angle alpha.
inline Vec2 rotate(const Vec2& v, double alpha) {
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Signed lattice index pair, j in Z_h^2 = [-N/2, N/2)^2.
struct Index2 {
    int j1 = 0;
    int j2 = 0;
    bool operator==(const Index2&) const = default;
};

inline constexpr double inf = std::numeric_limits<double>::infinity();

}  // namespace scatter2d
