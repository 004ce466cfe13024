#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace fracns {

// Parallelism cap: FRACNS_THREADS env var, else 1.  Only pointwise loops with
// independent outputs are parallelized, so results do not depend on the
// thread count.
int thread_count();
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// C-infinity transition g(x) = exp(-1/x) for x > 0, used by all cutoffs.
inline double bump_g(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// Radial plateau cutoff: 1 on [0, r1], 0 on [r2, inf), smooth between.
// cut(r) = g((r2-r)/(r2-r1)) / (g((r2-r)/(r2-r1)) + g((r-r1)/(r2-r1))).
inline double radial_cutoff(double r, double r1, double r2) {
    if (r <= r1) return 1.0;
    if (r >= r2) return 0.0;
    double t = (r - r1) / (r2 - r1);
    double up = bump_g(1.0 - t), dn = bump_g(t);
    return up / (up + dn);
}

// Littlewood-Paley bump rho: radial_cutoff with radii (1, 2).  Published
// formula; bit-reproducible.
inline double lp_rho(double r) { return radial_cutoff(r, 1.0, 2.0); }

// Fixed polynomial bump psi on the unit ball, integral 1:
// psi(x) = 3465/(512 pi) (1-|x|^2)^4 for |x| < 1.
inline double psi_bump(double r) {
    if (r >= 1.0) return 0.0;
    double q = 1.0 - r * r;
    double q2 = q * q;
    return 3465.0 / (512.0 * M_PI) * q2 * q2;
}

// Deterministic splittable RNG (xoshiro-free; std engines are seeded per use).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fracns
