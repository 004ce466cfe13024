#pragma once

#include "fracns/maximal.hpp"
#include "fracns/spectral.hpp"

namespace fracns {

// Pressure recovered from the velocity: p-hat = -(xi_i xi_j / |xi|^2) times
// the transform of the dealiased product u_i u_j, zero mean by convention.
struct PressurePair {
    ScalarField p;
    VectorField grad;
};

// errors: input not divergence-free to 1e-8 (relative).
PressurePair solve_pressure(const VectorField& u);

// || R^n Lambda^{2s} p ||_1 / || Lambda^s u ||_2^2 where R^n ranges over all
// n-fold compositions of Riesz transforms (n in 0..2) and the worst one is
// reported; 0 for zero velocity.
double pressure_hardy_ratio(const VectorField& u, int n, double s);

// max over the probe shells (radius from the box center, thickness one cell)
// of |R^n Lambda^{2s} g(x)| * (1 + |x|)^{3+eta}, worst Riesz composition.
// pre: eta in (0, 2s); probe radii <= L/4.
double decay_check(const ScalarField& g, double s, int n, double eta,
                   const std::vector<double>& probe_radii);

// phi grad p = phi grad Rij(u_i u_j phibar) + Gamma
struct PressureLocalization {
    VectorField riesz_part;  // phi grad Rij(u_i u_j phibar)
    VectorField remainder;   // Gamma
    std::array<double, 3> remainder_wk_inf;  // ||Gamma||_{W^{k,inf}}, k = 0,1,2
};

// pre: phibar = 1 on supp phi (nesting checked). errors: nesting violated.
PressureLocalization localize_pressure(const ScalarField& p, const VectorField& u,
                                       const ScalarField& phi, const ScalarField& phibar);

// || g - (g)_psi ||_{L^{6/5}(B_{5/4})} / ( || Lambda^{2s-1} g ||_{L^1(B_5)}
//   + || grand_max(Lambda^{2s-1} g) ||_{L^1(B_3)} ),
// with the concentric radii (1, 5/4, 3, 5) scaled affinely so the outer ball
// has radius 0.22 L, psi the normalized bump on the unit ball, everything
// centered at the box center.  0/0 -> 0.
double poincare_pressure_ratio(const VectorField& g, double s);

// max over grid points and all derivative multi-indices |alpha| <= k of
// |d^alpha f| (derivatives spectral).
double wk_inf_norm(const ScalarField& f, int k);

}  // namespace fracns
