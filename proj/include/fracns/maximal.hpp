#pragma once

#include <string>

#include "fracns/spectral.hpp"

namespace fracns {

// A Schwartz-class test profile: product over axes of P_i(x_i/w) e^{-x_i^2/2w^2}
// with first-degree polynomials P_i.  Closed under differentiation, which the
// admissibility normalization needs.
struct TestProfile {
    std::string name;
    double width = 1.0;
    std::array<std::array<double, 2>, 3> poly{{{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}};
    double scale = 1.0;  // set by normalization

    double value(const std::array<double, 3>& x) const;
    // integral over R^3 of (1+|x|)^N sum_{|alpha| <= N+1} |d^alpha psi|, N = 4
    double schwartz_budget() const;
};

struct TestFunctionFamily {
    std::vector<TestProfile> members;
};

// Gaussians at 3 widths plus first-order Hermite modulations along each axis,
// each rescaled so its Schwartz budget (N=4) equals 1.
TestFunctionFamily make_admissible_family();

// sup over dyadic radii r in {h/2} cup {h, 2h, ..., <= L/4} of periodic ball
// averages of |f|.  The h/2 rung is the single-cell average, so Mf >= |f|.
ScalarField hardy_littlewood_max(const ScalarField& field);

// sup_t |Psi_t * f| over the dyadic ladder t in {h, 2h, ..., <= L/4};
// convolutions computed spectrally with min-image sampled kernels.
ScalarField smooth_max(const ScalarField& field, const TestProfile& psi);

// sup over the ladder and |y - x|_inf <= t of |Psi_t * f(y)| (aperture 1
// measured in the max norm; contains the Euclidean aperture-1 cone).
ScalarField nontangential_max(const ScalarField& field, const TestProfile& psi);

// pointwise max of nontangential_max over the family; a LOWER bound for the
// true grand maximal function.
ScalarField grand_max_approx(const ScalarField& field, const TestFunctionFamily& family);

// max over probes z and grid points x of |f(x-z)| / ((1+r|z|)^3 Mf(x)) for
// band-limited f (spectrum inside |xi| <= r).
double band_limited_max_bound_check(const ScalarField& field, double r,
                                    const std::vector<std::array<int, 3>>& probe_offsets);

// ||f||_1 + sum_j ||R_j f||_1 (computable Hardy-norm proxy)
double hardy_norm_proxy(const ScalarField& field);

// circular convolution sum_y w(y) a(x - y), spectral evaluation
ScalarField convolve_periodic(const ScalarField& a, const ScalarField& kernel);

}  // namespace fracns
