#pragma once

#include "fracns/spectral.hpp"

namespace fracns {

// [Lambda^beta, phi] v = Lambda^beta(dealias(phi v)) - phi Lambda^beta v.
// pre: beta in (1/2, 2).
ScalarField spectral_commutator(const ScalarField& phi, const ScalarField& v, double beta);

// Nested cutoff geometry for the local/tail splitting of the commutator
// kernel: phi is a smooth bump supported in the ball B_R around `center`,
// chi(r) is the radial kernel cutoff equal to 1 on [0, rho] and vanishing
// beyond 2 rho, with rho = (R0 - R)/5.
struct CutoffPair {
    TorusGrid grid;
    std::array<double, 3> center{};
    double R = 0.0, R0 = 0.0, rho = 0.0;
    ScalarField phi;

    double chi(double r) const;
    // radial profile of phi (~1 near 0, 0 beyond 0.95 R, erfc roll-off between)
    double phi_radial(double r) const;
};

// pre: 0 < R < R0 <= L/2 and 2 rho < R (so the local kernel window sits
// inside the plateau scale); errors: invalid_argument.
CutoffPair make_cutoff_pair(const TorusGrid& g, const std::array<double, 3>& center,
                            double R, double R0);

// The four singular integrals of the kernel-side commutator
//   p.v. int G(y) (phi(x) - phi(y)) K(x-y) dy,   K(d) = |d|^{-3-beta}
// split by chi into local (l1: G frozen at x, l2: difference remainder) and
// tail (t1: phi(x) outside, t2: -(G phi) convolved) pieces.  All quadrature
// runs on a 2x spectrally refined lattice; the principal values use
// symmetric-offset pairing so the odd-kernel cancellation is exact.  The sum
// equals calibrate_cbeta(grid, beta) times the spectral commutator up to
// quadrature error.
struct CommutatorPieces {
    ScalarField l1, l2, t1, t2;
    ScalarField sum() const;
};

// `refine` is the quadrature lattice refinement factor over the field grid
// (a power of two, at least 2).
// errors: beta outside (1/2, 2), grid mismatch, non-finite quadrature.
CommutatorPieces decomposed_commutator(const CutoffPair& cutoffs, const ScalarField& G,
                                       double beta, int refine = 2);

// Ratio between the raw lattice singular integral and the spectral
// Lambda^beta on a plane wave: the kernel normalization constant the
// decomposition needs.  Depends on (n, L, beta) and the refinement only.
double calibrate_cbeta(const TorusGrid& g, double beta, int refine = 2);

// || tail integral ||_{W^{k,inf}(B_R)} divided by the maximal-function
// right-hand side:
//   trick1: integrand u(y),          denom ||M(Lambda^s u)||_{L2(B_R)} + ||u||_{L1(B_R)}
//   trick2: integrand Lambda^gamma u, denom ||M(Lambda^s u)||_{L2(B_R)}
// with the tail kernel (1 - chi_rho)(d) |d|^{-3-beta}.
// pre: beta > s; k in 0..2; trick2 additionally 0 <= gamma - s < 1 and
// gamma <= 1.
enum class TailVariant { trick1, trick2 };
double tail_trick_ratio(const ScalarField& u, const CutoffPair& cutoffs, double s,
                        double beta, TailVariant variant, double gamma, int k);

// max over grid points inside the ball and derivative multi-indices
// |alpha| <= k of |d^alpha f| (spectral derivatives).
double wk_inf_norm_ball(const ScalarField& f, int k, const Ball& region);

}  // namespace fracns
