#include "esr/geometry.hpp"

namespace esr {

namespace {

double chord_ratio(int n, double phi) {
    // sin(n*phi)/sin(phi), with the removable singularity at phi = 0.
    if (phi <= 0.0) return static_cast<double>(n);
    return std::sin(n * phi) / std::sin(phi);
}

} // namespace

double arc_chord_angle(int n_hops, double hop_len, double chord_len, double solver_eps) {
    if (n_hops < 1) throw std::invalid_argument("arc_chord_angle: n_hops must be positive");
    if (hop_len <= 0.0 || hop_len > 2.0) throw std::invalid_argument("arc_chord_angle: hop_len must be in (0, 2]");
    if (chord_len <= 0.0) throw std::invalid_argument("arc_chord_angle: chord_len must be positive");
    double target = chord_len / hop_len;
    if (target > n_hops)
        throw std::invalid_argument("arc_chord_angle: chord longer than the chain can reach");
    if (target == static_cast<double>(n_hops)) return 0.0;

    double lo = 0.0;                      // ratio(lo) = n >= target
    double hi = M_PI / n_hops;            // ratio(hi) = 0 < target
    while (hi - lo > solver_eps) {
        double mid = 0.5 * (lo + hi);
        if (chord_ratio(n_hops, mid) >= target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace esr
