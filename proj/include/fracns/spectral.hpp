#pragma once

#include "fracns/fft.hpp"

namespace fracns {

// Apply a scalar multiplier m(xi_vec) in Fourier space.  The zero mode is
// mapped to zero whenever zero_mode_to_zero is set (convention for all
// homogeneous multipliers).  kill_nyquist additionally zeroes planes with a
// mode index equal to -n/2; required for odd (imaginary) symbols so the
// output stays real.
ScalarField apply_multiplier(const ScalarField& f,
                             const std::function<std::complex<double>(double, double, double)>& m,
                             bool zero_mode_to_zero, bool kill_nyquist);
void apply_multiplier_inplace(SpectralField& spec,
                              const std::function<std::complex<double>(double, double, double)>& m,
                              bool zero_mode_to_zero, bool kill_nyquist);

// Lambda^gamma = |xi|^gamma multiplier; gamma >= -1; zero mode -> 0.
ScalarField fractional_laplacian(const ScalarField& field, double gamma);
VectorField fractional_laplacian(const VectorField& field, double gamma);

// R_j with symbol -i xi_j / |xi|; j in {1,2,3} (1-based).
ScalarField riesz_transform(const ScalarField& field, int j);

// partial_j, symbol i xi_j.
ScalarField derivative(const ScalarField& field, int j);
VectorField gradient(const ScalarField& field);
ScalarField divergence(const VectorField& field);

enum class LPKind { block, low, high };
// Littlewood-Paley projections built from lp_rho(2^{-j}|xi|).
ScalarField littlewood_paley(const ScalarField& field, int j, LPKind kind);

// e^{-t |xi|^{2s}}
ScalarField fractional_heat(const ScalarField& field, double t, double s);

// Double-sum quadrature of the Gagliardo seminorm over a region (Ball with
// radius <= 0 or radius >= L means the full cell).  Pairs closer than one
// grid spacing are excluded.
double sobolev_slobodeckij_seminorm(const ScalarField& field, double gamma, double p,
                                    const Ball& region);

// ||Lambda^alpha(fg)||_r / (||Lambda^alpha f||_p1 ||g||_q1 + ||f||_p2 ||Lambda^alpha g||_q2)
struct LeibnizExponents {
    double r, p1, q1, p2, q2;
};
double fractional_leibniz_check(const ScalarField& f, const ScalarField& g, double alpha,
                                const LeibnizExponents& e);

// Zero every mode with any |mode index| > n/3 (2/3 dealiasing).
void dealias_inplace(SpectralField& spec);
ScalarField dealias(const ScalarField& f);

// Band limit to |mode| <= kmax on each axis shell |xi| <= r.
ScalarField truncate_to_ball(const ScalarField& f, double r);

// sampled radial cutoff field centered at c
ScalarField sample_radial(const TorusGrid& g, const std::array<double, 3>& c,
                          const std::function<double(double)>& profile);

// Mean-zero random field with spectrum restricted to the shell
// k1 <= |mode| <= k2, unit L2 norm, deterministic in the seed.
ScalarField random_band_scalar(const TorusGrid& g, double k1, double k2, std::uint64_t seed);

}  // namespace fracns
