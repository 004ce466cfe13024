#pragma once

#include "fracns/spectral.hpp"

namespace fracns {

// Radial profile phi with  u-hat*(xi, y) = phi(|xi| y) u-hat(xi):
// the Fourier transform of the extension kernel
//   P(x,y) = c_s y^{2s} (|x|^2 + y^2)^{-(3+2s)/2},
// normalized so phi(0) = 1.  Tabulated on a log grid by radial quadrature of
//   Qhat(t) = 4 pi  int_0^inf r^2 sinc(t r) (r^2+1)^{-(3+2s)/2} dr,
// phi(t) = Qhat(t)/Qhat(0).  phi solves phi'' + (a/t) phi' = phi and decays
// exponentially; values beyond the table are treated as 0.
struct ExtensionProfile {
    double s = 0.0;
    std::vector<double> t;    // strictly increasing, t[0] > 0
    std::vector<double> phi;  // same length
    double c_s = 0.0;         // kernel normalization 1/Qhat(0) (up to 4pi)
    double A = 0.0;           // fitted coefficient of t^{2s} in phi ~ 1 + A t^{2s} + B t^2
    double B = 0.0;
    // With the boundary trace pinned to phi(0) = 1, the weighted extension
    // energy of a unit plane wave is int_0^inf t^a (phi^2 + phi'^2) dt, not 1;
    // this calibrated constant divides the energy so that the identity
    // "energy = ||Lambda^s u||_2^2" holds on the nose.
    double energy_norm = 1.0;

    double operator()(double tv) const;  // interpolated evaluation, exact 1 at 0
};

ExtensionProfile build_profile(double s);
ExtensionProfile build_profile(double s, const std::vector<double>& t_grid);

// Graded geometric y-mesh: count levels, top level = L, ratio 1.15 at 64
// levels; refinement shrinks both the first level and the ratio so the
// weighted-energy quadrature converges.
std::vector<double> make_y_levels(const TorusGrid& g, int count);

struct ExtendedField {
    TorusGrid grid;
    double s = 0.0;
    ScalarField boundary;                    // y = 0 trace
    std::vector<double> y;                   // strictly increasing levels
    std::vector<std::vector<double>> level;  // per level, n^3 samples
    double energy_norm = 1.0;                // copied from the profile

    double weight_a() const { return 1.0 - 2.0 * s; }
};

ExtendedField extend(const ScalarField& field, const ExtensionProfile& profile,
                     const std::vector<double>& y_levels);

// int int y^a |grad_{x,y} u*|^2 over the cell (or a ball) and y in [0, y_max].
// x-gradients spectral per level, y-derivative by cell differences, per-cell
// weight mass int y^a dy exact.  y_max <= 0 means the full level range.
double weighted_energy(const ExtendedField& ext);
double weighted_energy(const ExtendedField& ext, const Ball& region, double y_max);

// y^a |grad u*|^2 integrated per y-cell and returned as fields on the grid
// (used by the scale-optimal G diagnostics); entry c covers the y-cell
// [Y_c, Y_{c+1}] with Y_0 = 0.
std::vector<ScalarField> weighted_gradient_cell_integrals(const ExtendedField& ext,
                                                          double y_max);

// -Cbar_s * lim_{y->0} y^a d_y u*, extrapolated from the first four levels
// (Richardson in y^{2-2s}).  Cbar_s comes from calibrate_cbar.
ScalarField recover_frac_laplacian(const ExtendedField& ext, double cbar_s);

// One-time plane-wave calibration of Cbar_s for a profile (independent of the
// grid used later).
double calibrate_cbar(const ExtensionProfile& profile);

// || f ||_{L^{6/(3-2s)}(B_r)} / || y^{a/2} grad u* ||_{L^2(B_2r x [0,2r))}
// for a mean-localized f (int f phi_bump = 0 enforced by the caller via
// mean_localize).  0/0 -> 0.
double poincare_extension_check(const ScalarField& f, const ExtensionProfile& profile,
                                const Ball& inner, const std::vector<double>& y_levels);

// subtract the psi_bump(B_inner) component so that int f phi = 0
ScalarField mean_localize(const ScalarField& f, const Ball& inner);

// weighted Poincare on the cylinder B x [0, r):
// int y^a |u* - mean|^2 / int y^a |grad u*|^2 with the y^a-weighted mean.
double weighted_poincare_ratio(const ExtendedField& ext, const Ball& region);

// Stacked-frame serialization (FNS1 header + u32 level count + y table +
// per-level payloads).
void write_extended(const std::string& path, const ExtendedField& ext);
ExtendedField read_extended(const std::string& path);

}  // namespace fracns
