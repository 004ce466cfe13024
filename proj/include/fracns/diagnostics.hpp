#pragma once

#include "fracns/extension.hpp"
#include "fracns/maximal.hpp"
#include "fracns/pressure.hpp"
#include "fracns/solver.hpp"

namespace fracns {

// Space-time cylinder B_r(x) x (t - r^{2s}, t]; the extended variant adds the
// wall-normal range y in [0, r).
struct CylinderSpec {
    std::array<double, 3> x{};
    double t = 0.0;
    double r = 0.0;
};

// pre: r <= L/8 and t - r^{2s} inside the trajectory span.
void validate_cylinder(const CylinderSpec& c, const TorusGrid& g, double s, double t_min,
                       double t_max);

// sup over a geometric level ladder of  lambda * |{ |f| > lambda }|^{1/p}.
struct WeakLpResult {
    double p = 0.0;
    double c = 0.0;                 // the quasi-norm estimate
    std::vector<double> ladder;     // levels tried (decreasing)
    double attained_level = 0.0;    // the level realizing the sup
};

// Level-set measures by cell counting over the ball region (radius <= 0
// means the whole box).  Ladder: six geometric rungs spanning
// [min positive |f|, max |f|].  errors: empty region, p < 1.
WeakLpResult weak_lp_norm(const ScalarField& f, double p, const Ball& region);

// Weak norm over the space-time product K x {frames i0..i1} with measure
// h^3 * frame spacing.
WeakLpResult weak_lp_norm_spacetime(const std::vector<ScalarField>& slices,
                                    const std::vector<double>& times, double p,
                                    const Ball& region);

// F = (M |Lambda^s u|^{2/(1+delta)})^{1+delta} + |Lambda^{2s-1} grad p|
//     + grand-max(|Lambda^{2s-1} grad p|),  delta = 2s/(6-s).
struct ScaleOptimalF {
    ScalarField total, maximal_part, pressure_part, grand_part;
};
ScaleOptimalF scale_optimal_F(const VectorField& u, const PressurePair& pressure, double s);

// G(x, y, t) = y^a |grad_{x,y} u*|^2 for the component-wise extension of u,
// returned as per-y-cell integrals (fields on the grid); y_max <= 0 takes the
// whole level range.  Summing cells and x against h^3 reproduces
// ||Lambda^s u||_2^2 (the extension energy identity).
std::vector<ScalarField> scale_optimal_G(const VectorField& u, const ExtensionProfile& profile,
                                         const std::vector<double>& y_levels, double y_max);

// Separable nonnegative test function xi(x, y, t) = space(x) * height(y) * time(t)
// for the local energy inequality; height and time are smooth profiles with
// analytic derivatives.
struct LeiTestFunction {
    ScalarField space;                       // >= 0, sampled on the grid
    std::function<double(double)> height;    // [0, inf) -> [0, 1], compact support
    std::function<double(double)> height_d1; // dheight/dy
    std::function<double(double)> height_d2;
    std::function<double(double)> time_w;    // tau -> weight >= 0
    std::function<double(double)> time_d1;
};

// Right side minus left side of the local energy inequality over frames
// [i0, i1]; zero for exact smooth solutions up to quadrature error, and
// nonnegative for suitable ones.  The extension-energy constant is the
// profile calibration (so the dissipation term matches ||Lambda^s u||^2
// when xi = 1).  errors: negative xi, bad frame range.
double local_energy_residual(const Trajectory& traj, const LeiTestFunction& xi,
                             const ExtensionProfile& profile,
                             const std::vector<double>& y_levels,
                             std::size_t i0, std::size_t i1);

// Per-cylinder smallness data for the single-scale regularity criterion.
struct CylinderReport {
    CylinderSpec spec;
    double extension_energy = 0.0;   // int_{Q*} y^a |grad u*|^2
    double slobodeckij = 0.0;        // double integral over B x B in time
    double f_integral = 0.0;         // int_Q F
    double cubic = 0.0;              // int_Q |u|^3 + |p|^{3/2}
    double rescaled_sum = 0.0;       // total / r^{5-4s}
    bool small = false;              // rescaled_sum <= eps
};

struct ScanReport {
    double s = 0.0;
    double eps = 0.0;
    std::vector<CylinderReport> cylinders;
    std::vector<double> radii;        // the ladder
    std::vector<int> bad_count;       // M'(r) per rung (disjoint probe lattice)
    double slope = 0.0;               // log M' vs log(1/r) fit; 0 if degenerate
    double dimension_bound = 0.0;     // (15 - 2s - 8s^2)/3
};

// Scans a disjoint probe lattice of cylinders (spacing 2r, one probe time per
// rung) over the trajectory.  eps <= 0 requests self-calibration to twice the
// largest rescaled sum observed.  errors: ladder radius too large for the
// grid or the time span.
ScanReport eps_regularity_scan(const Trajectory& traj, double s, double eps,
                               const std::vector<double>& radii);

// Mollified velocity: spectral convolution with psi_lambda = lambda^{-3}
// psi(x/lambda), psi the fixed polynomial bump on the unit ball.
// pre: lambda >= grid spacing.
VectorField mollified_velocity(const VectorField& u, double lambda);

// Backward flow along the mollified velocity: dPhi/dtau = u_bar(Phi, tau),
// Phi(t) = seed, integrated from t down to tau_end with RK4 (tricubic
// interpolation on a 2x spectrally upsampled lattice; linear in time between
// frames).  Returns one path per seed, sampled at the integration nodes.
struct FlowPaths {
    std::vector<double> tau;                                // decreasing from t
    std::vector<std::vector<std::array<double, 3>>> pos;    // [seed][node]
};
FlowPaths flow_map(const Trajectory& traj, double lambda,
                   const std::vector<std::array<double, 3>>& seeds, double t,
                   double tau_end, int steps);

// max over probe centers of | |det DPhi| - 1 | at the final node; the
// Jacobian is taken by central differences over +-edge/2 offsets along each
// axis (six auxiliary trajectories per center).
double flow_volume_defect(const Trajectory& traj, double lambda,
                          const std::vector<std::array<double, 3>>& centers, double edge,
                          double t, double tau_end, int steps);

// Level-set/Chebyshev table: per ladder rung lambda, the measure of
// {|grad^n u| >= lambda^{-(2s+n-1)}} at the final frame against
// lambda^{6s-2} times the trailing-slab dissipation, plus the H-functional
// on a small probe set (F + G + Slobodeckij along the backward flow).
struct LevelsetRow {
    double lambda = 0.0;
    double level_measure = 0.0;     // |{ |grad^n u| >= threshold }|
    double threshold = 0.0;         // c0 * lambda^{-(2s+n-1)}
    double slab_dissipation = 0.0;  // int_{t-(5 lambda)^{2s}}^t ||Lambda^s u||^2
    double ratio = 0.0;             // level_measure / (lambda^{6s-2} * slab_dissipation)
    double h_max = 0.0;             // max H over the probe set
    double h_scale = 0.0;           // lambda^{5-4s} (the smallness scale for H)
};
// c0 scales the thresholds (the level-set inclusion holds for SOME constant,
// unspecified by the theory); c0 <= 0 self-calibrates so the largest-lambda
// rung sits at 30% of max |grad^n u| and the table is nondegenerate.
std::vector<LevelsetRow> levelset_bound_check(const Trajectory& traj, double s,
                                              const std::vector<double>& lambdas, int n,
                                              double c0 = -1.0);

// p = 2(3s-1)/(n+2s-1).  pre: s in [3/4, 1], n in {1, 2}.
double derivative_exponent(double s, int n);

// ((15 - 2s - 8s^2)/3, (-16s^2 + 16s + 5)/3): box-counting bounds for
// suitable and general Leray-Hopf solutions.  pre: s in [3/4, 1].
std::pair<double, double> dimension_bounds(double s);

// || grad^n u ||^p_{L^{p,inf}((t0,T) x K)} / (||u0||_2^2 + |K| t0^{-(2-1/s)}),
// p = derivative_exponent(s, n); frames with time < t0 excluded.
double apriori_weak_lp_check(const Trajectory& traj, int n, double t0, const Ball& region);

}  // namespace fracns
