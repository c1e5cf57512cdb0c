#pragma once

#include <cmath>
#include <stdexcept>

namespace esr {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
        return *this / n;
    }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline double distance(const Vec3& p, const Vec3& q) { return (p - q).norm(); }

/// Comparison tolerances shared by all modules. dist_eq is the indifference
/// band for room-cost comparisons, solver_eps drives the 1D root finders.
struct Tolerance {
    double dist_eq = 1e-6;
    double solver_eps = 1e-12;

    bool valid() const {
        return solver_eps > 0.0 && solver_eps < dist_eq && dist_eq < 1e-3;
    }
    void check() const {
        if (!valid()) throw std::invalid_argument("tolerance must satisfy 0 < solver_eps < dist_eq < 1e-3");
    }
};

/// Half-angle phi of the circular arc on which n_hops equal chords of
/// length hop_len span a straight-line distance of chord_len, i.e. the
/// root of sin(n*phi)/sin(phi) = chord_len/hop_len on [0, pi/n).
///
/// The ratio decreases monotonically from n at phi=0 to 0 at phi=pi/n,
/// so a bisection bracket always exists. Returns exactly 0 when the
/// chain is straight (chord_len == n_hops*hop_len).
double arc_chord_angle(int n_hops, double hop_len, double chord_len, double solver_eps);

} // namespace esr
