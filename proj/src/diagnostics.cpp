#include "fracns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fracns/fft.hpp"
#include "fracns/util.hpp"

namespace fracns {

namespace {

// samples of |f| (with quadrature weights) over a periodic ball; radius <= 0
// means the whole box
void collect_abs_samples(const ScalarField& f, const Ball& region, double weight,
                         std::vector<std::pair<double, double>>& out) {
    const TorusGrid& g = f.grid;
    bool whole = region.radius <= 0.0 || region.radius >= 0.5 * g.L;
    double r2 = region.radius * region.radius;
    for (std::size_t id = 0; id < g.size(); ++id) {
        if (!whole) {
            auto c = g.coords(id);
            std::array<double, 3> x{g.x(c[0]), g.x(c[1]), g.x(c[2])};
            if (g.dist2(x, region.center) > r2) continue;
        }
        out.emplace_back(std::abs(f.v[id]), weight);
    }
}

WeakLpResult weak_lp_from_samples(std::vector<std::pair<double, double>>& samples,
                                  double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("weak_lp_norm: p must be >= 1");
    if (samples.empty()) throw std::invalid_argument("weak_lp_norm: empty region");
    std::sort(samples.begin(), samples.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    WeakLpResult out;
    out.p = p;
    double vmax = samples.front().first;
    double vmin = 0.0;
    for (auto it = samples.rbegin(); it != samples.rend(); ++it)
        if (it->first > 0.0) {
            vmin = it->first;
            break;
        }
    if (vmax <= 0.0) return out;  // f = 0
    if (vmin <= 0.0) vmin = vmax * 1e-6;
    // prefix sums of the weights in decreasing-value order
    std::vector<double> acc(samples.size());
    double run = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        run += samples[i].second;
        acc[i] = run;
    }
    // seven geometric rungs spanning [vmin, vmax]; super-level sets counted
    // with >= so flat (indicator-like) profiles keep their full plateau
    const int rungs = 6;
    double ratio = vmax > vmin ? std::pow(vmax / vmin, 1.0 / rungs) : 2.0;
    for (int j = 0; j <= rungs; ++j) {
        double lam = vmax * std::pow(ratio, -double(j));
        // measure of { |f| >= lam }
        std::size_t lo = 0, hi = samples.size();
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (samples[mid].first >= lam)
                lo = mid + 1;
            else
                hi = mid;
        }
        double measure = lo == 0 ? 0.0 : acc[lo - 1];
        double c = lam * std::pow(measure, 1.0 / p);
        out.ladder.push_back(lam);
        if (c > out.c) {
            out.c = c;
            out.attained_level = lam;
        }
    }
    return out;
}

ScalarField vector_magnitude(const VectorField& u) {
    ScalarField out(u.grid);
    for (std::size_t id = 0; id < out.v.size(); ++id) out.v[id] = u.magnitude(id);
    return out;
}

// |grad^n u| as a scalar field (Frobenius norm over all components), n in {1,2}
ScalarField derivative_magnitude(const VectorField& u, int n) {
    ScalarField out(u.grid);
    for (int c = 0; c < 3; ++c) {
        ScalarField comp = u.component(c);
        for (int i = 1; i <= 3; ++i) {
            ScalarField di = derivative(comp, i);
            if (n == 1) {
                for (std::size_t id = 0; id < out.v.size(); ++id)
                    out.v[id] += di.v[id] * di.v[id];
            } else {
                for (int j = 1; j <= 3; ++j) {
                    ScalarField dij = derivative(di, j);
                    for (std::size_t id = 0; id < out.v.size(); ++id)
                        out.v[id] += dij.v[id] * dij.v[id];
                }
            }
        }
    }
    for (double& v : out.v) v = std::sqrt(v);
    return out;
}

// trapezoid weights for the sub-range [i0, i1] of the frame times
std::vector<double> trapezoid_weights(const std::vector<double>& t, std::size_t i0,
                                      std::size_t i1) {
    std::vector<double> w(i1 - i0 + 1, 0.0);
    for (std::size_t i = i0; i < i1; ++i) {
        double dt = t[i + 1] - t[i];
        w[i - i0] += 0.5 * dt;
        w[i - i0 + 1] += 0.5 * dt;
    }
    return w;
}

// ball integral (midpoint cells) of f around a center
double ball_integral(const ScalarField& f, const std::array<double, 3>& center,
                     double radius) {
    const TorusGrid& g = f.grid;
    double h3 = std::pow(g.spacing(), 3);
    double r2 = radius * radius, acc = 0.0;
    for (std::size_t id = 0; id < g.size(); ++id) {
        auto c = g.coords(id);
        std::array<double, 3> x{g.x(c[0]), g.x(c[1]), g.x(c[2])};
        if (g.dist2(x, center) <= r2) acc += f.v[id];
    }
    return acc * h3;
}

}  // namespace

void validate_cylinder(const CylinderSpec& c, const TorusGrid& g, double s, double t_min,
                       double t_max) {
    if (!(c.r > 0.0 && c.r <= g.L / 8.0))
        throw std::invalid_argument("cylinder radius must lie in (0, L/8]");
    double t0 = c.t - std::pow(c.r, 2.0 * s);
    if (!(t0 >= t_min && c.t <= t_max))
        throw std::invalid_argument("cylinder time extent outside the trajectory span");
}

WeakLpResult weak_lp_norm(const ScalarField& f, double p, const Ball& region) {
    std::vector<std::pair<double, double>> samples;
    double h3 = std::pow(f.grid.spacing(), 3);
    collect_abs_samples(f, region, h3, samples);
    return weak_lp_from_samples(samples, p);
}

WeakLpResult weak_lp_norm_spacetime(const std::vector<ScalarField>& slices,
                                    const std::vector<double>& times, double p,
                                    const Ball& region) {
    if (slices.empty() || slices.size() != times.size())
        throw std::invalid_argument("weak_lp_norm_spacetime: slice/time mismatch");
    std::vector<std::pair<double, double>> samples;
    double h3 = std::pow(slices.front().grid.spacing(), 3);
    std::vector<double> w = trapezoid_weights(times, 0, times.size() - 1);
    if (times.size() == 1) w[0] = 1.0;  // single-frame degenerate case
    for (std::size_t i = 0; i < slices.size(); ++i)
        collect_abs_samples(slices[i], region, h3 * w[i], samples);
    return weak_lp_from_samples(samples, p);
}

ScaleOptimalF scale_optimal_F(const VectorField& u, const PressurePair& pressure,
                              double s) {
    require_same_grid(u.grid, pressure.p.grid);
    const TorusGrid& g = u.grid;
    double delta = 2.0 * s / (6.0 - s);
    double e = 2.0 / (1.0 + delta);

    ScalarField lsu = vector_magnitude(fractional_laplacian(u, s));
    ScalarField powed(g);
    for (std::size_t id = 0; id < powed.v.size(); ++id)
        powed.v[id] = std::pow(lsu.v[id], e);
    ScalarField m = hardy_littlewood_max(powed);

    ScaleOptimalF out{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
    for (std::size_t id = 0; id < g.size(); ++id)
        out.maximal_part.v[id] = std::pow(m.v[id], 1.0 + delta);

    VectorField lgp(g);
    static TestFunctionFamily family = make_admissible_family();
    VectorField grand(g);
    for (int c = 0; c < 3; ++c) {
        ScalarField comp =
            fractional_laplacian(pressure.grad.component(c), 2.0 * s - 1.0);
        grand.set_component(c, grand_max_approx(comp, family));
        lgp.set_component(c, comp);
    }
    out.pressure_part = vector_magnitude(lgp);
    out.grand_part = vector_magnitude(grand);
    for (std::size_t id = 0; id < g.size(); ++id)
        out.total.v[id] =
            out.maximal_part.v[id] + out.pressure_part.v[id] + out.grand_part.v[id];
    return out;
}

std::vector<ScalarField> scale_optimal_G(const VectorField& u,
                                         const ExtensionProfile& profile,
                                         const std::vector<double>& y_levels,
                                         double y_max) {
    std::vector<ScalarField> cells;
    for (int c = 0; c < 3; ++c) {
        ExtendedField ext = extend(u.component(c), profile, y_levels);
        std::vector<ScalarField> part = weighted_gradient_cell_integrals(ext, y_max);
        if (cells.empty()) {
            cells = std::move(part);
        } else {
            for (std::size_t j = 0; j < cells.size(); ++j)
                for (std::size_t id = 0; id < cells[j].v.size(); ++id)
                    cells[j].v[id] += part[j].v[id];
        }
    }
    return cells;
}

double local_energy_residual(const Trajectory& traj, const LeiTestFunction& xi,
                             const ExtensionProfile& profile,
                             const std::vector<double>& y_levels,
                             std::size_t i0, std::size_t i1) {
    // the per-cell gradient integrals are pre-normalized by the profile
    // calibration, so the dissipation carries coefficient 2 directly; the raw
    // |u*|^2 term below needs the same constant made explicit
    const double cbar_s = 1.0 / profile.energy_norm;
    if (!(i0 < i1 && i1 < traj.frames.size()))
        throw std::invalid_argument("local_energy_residual: bad frame range");
    const TorusGrid& g = traj.grid;
    for (double v : xi.space.v)
        if (v < 0.0)
            throw std::invalid_argument("local_energy_residual: xi must be nonnegative");
    const double h3 = std::pow(g.spacing(), 3);
    const double a = 1.0 - 2.0 * traj.config.s;
    const double eta0 = xi.height(0.0);
    if (eta0 < 0.0 || xi.time_w(traj.times[i0]) < 0.0)
        throw std::invalid_argument("local_energy_residual: xi must be nonnegative");

    ScalarField lap_xi(g);
    {
        ScalarField acc(g);
        for (int j = 1; j <= 3; ++j) acc = acc + derivative(derivative(xi.space, j), j);
        lap_xi = acc;
    }
    VectorField grad_xi = gradient(xi.space);

    // y-cell geometry shared by all frames: cell c covers [Y_c, Y_{c+1}],
    // midpoint values of eta and its derivatives, exact weight masses
    std::vector<double> ymid, mass_a, mass_am1;
    {
        double y_lo = 0.0;
        for (double y_hi : y_levels) {
            double m = 0.5 * (y_lo + y_hi);
            ymid.push_back(m);
            mass_a.push_back((std::pow(y_hi, a + 1.0) - std::pow(y_lo, a + 1.0)) /
                             (a + 1.0));
            // int y^{a-1} over the cell; used only where eta' != 0, which the
            // test function keeps away from y = 0 (a - 1 < -1 there)
            mass_am1.push_back(y_lo > 0.0 ? (std::pow(y_hi, a) - std::pow(y_lo, a)) / a
                                          : 0.0);
            y_lo = y_hi;
        }
    }

    std::vector<double> tw = trapezoid_weights(traj.times, i0, i1);
    double lhs = 0.0, rhs = 0.0;

    // boundary-in-time terms
    auto energy_term = [&](std::size_t i) {
        const VectorField& u = traj.frames[i];
        double acc = 0.0;
        for (std::size_t id = 0; id < g.size(); ++id) {
            double m = u.magnitude(id);
            acc += m * m * xi.space.v[id];
        }
        return acc * h3 * eta0 * xi.time_w(traj.times[i]);
    };
    lhs += energy_term(i1);
    rhs += energy_term(i0);

    for (std::size_t i = i0; i <= i1; ++i) {
        const VectorField& u = traj.frames[i];
        double tauw = tw[i - i0];
        double timew = xi.time_w(traj.times[i]);
        double timed = xi.time_d1(traj.times[i]);
        if (timew < 0.0)
            throw std::invalid_argument("local_energy_residual: xi must be nonnegative");

        // extension-dependent terms
        std::vector<ScalarField> gcells;   // per-cell int y^a |grad u*|^2
        std::vector<ScalarField> usq;      // |u*|^2 at each level midpoint proxy
        {
            std::vector<ExtendedField> exts;
            for (int c = 0; c < 3; ++c)
                exts.push_back(extend(u.component(c), profile, y_levels));
            for (int c = 0; c < 3; ++c) {
                std::vector<ScalarField> part =
                    weighted_gradient_cell_integrals(exts[std::size_t(c)], -1.0);
                if (gcells.empty())
                    gcells = std::move(part);
                else
                    for (std::size_t j = 0; j < gcells.size(); ++j)
                        for (std::size_t id = 0; id < g.size(); ++id)
                            gcells[j].v[id] += part[j].v[id];
            }
            // cell-midpoint |u*|^2 via the face average (the cell spans the
            // faces lev-1 and lev, with the y = 0 trace closing the first cell)
            usq.assign(ymid.size(), ScalarField(g));
            for (std::size_t lev = 0; lev < ymid.size(); ++lev)
                for (int c = 0; c < 3; ++c) {
                    const ExtendedField& e = exts[std::size_t(c)];
                    const std::vector<double>& hi = e.level[lev];
                    const std::vector<double>* lo =
                        lev == 0 ? &e.boundary.v : &e.level[lev - 1];
                    for (std::size_t id = 0; id < g.size(); ++id)
                        usq[lev].v[id] +=
                            0.5 * ((*lo)[id] * (*lo)[id] + hi[id] * hi[id]);
                }
        }

        // LHS dissipation: 2 Cbar int y^a |grad u*|^2 xi
        double diss = 0.0;
        for (std::size_t lev = 0; lev < gcells.size(); ++lev) {
            double eta = xi.height(ymid[lev]);
            if (eta == 0.0) continue;
            double acc = 0.0;
            for (std::size_t id = 0; id < g.size(); ++id)
                acc += gcells[lev].v[id] * xi.space.v[id];
            diss += acc * eta;
        }
        lhs += 2.0 * diss * h3 * timew * tauw;

        // RHS commutator term: Cbar int |u*|^2 [ y^a eta Lap xi
        //   + xi (y^a eta'' + a y^{a-1} eta') ]
        double comm = 0.0;
        for (std::size_t lev = 0; lev < ymid.size(); ++lev) {
            double eta = xi.height(ymid[lev]);
            double e1 = xi.height_d1(ymid[lev]);
            double e2 = xi.height_d2(ymid[lev]);
            double acc = 0.0;
            if (eta != 0.0 || e2 != 0.0)
                for (std::size_t id = 0; id < g.size(); ++id)
                    acc += usq[lev].v[id] *
                           (mass_a[lev] * (eta * lap_xi.v[id] + e2 * xi.space.v[id]));
            double acc2 = 0.0;
            if (e1 != 0.0)
                for (std::size_t id = 0; id < g.size(); ++id)
                    acc2 += usq[lev].v[id] * xi.space.v[id];
            comm += acc + acc2 * a * mass_am1[lev] * e1;
        }
        rhs += cbar_s * comm * h3 * timew * tauw;

        // transport term: (u . grad xi)(2p + |u|^2) at y = 0
        PressurePair pr = solve_pressure(u);
        double trans = 0.0;
        for (std::size_t id = 0; id < g.size(); ++id) {
            double udotg = 0.0;
            for (int c = 0; c < 3; ++c)
                udotg += u.comp[std::size_t(c)][id] * grad_xi.comp[std::size_t(c)][id];
            double m = u.magnitude(id);
            trans += udotg * (2.0 * pr.p.v[id] + m * m);
        }
        rhs += trans * h3 * eta0 * timew * tauw;

        // time-derivative term: |u|^2 d_t xi (the y^a d_y xi boundary term
        // vanishes because eta is flat near y = 0)
        double tterm = 0.0;
        for (std::size_t id = 0; id < g.size(); ++id) {
            double m = u.magnitude(id);
            tterm += m * m * xi.space.v[id];
        }
        rhs += tterm * h3 * eta0 * timed * tauw;
    }
    return rhs - lhs;
}

ScanReport eps_regularity_scan(const Trajectory& traj, double s, double eps,
                               const std::vector<double>& radii) {
    const TorusGrid& g = traj.grid;
    if (traj.frames.empty()) throw std::invalid_argument("eps_regularity_scan: empty run");
    double t_min = traj.times.front(), t_max = traj.times.back();
    for (double r : radii) {
        if (!(r > 0.0 && r <= g.L / 8.0))
            throw std::invalid_argument("eps_regularity_scan: radius outside (0, L/8]");
        if (t_max - std::pow(r, 2.0 * s) < t_min)
            throw std::invalid_argument("eps_regularity_scan: radius ladder exceeds span");
    }

    // per-frame densities, computed once and shared across cylinders
    std::vector<ScalarField> f_fields, cubic_fields;
    std::vector<std::vector<ScalarField>> g_cells;
    ExtensionProfile profile = build_profile(s);
    std::vector<double> y_levels = make_y_levels(g, 32);
    for (const VectorField& u : traj.frames) {
        PressurePair pr = solve_pressure(u);
        f_fields.push_back(scale_optimal_F(u, pr, s).total);
        ScalarField cf(g);
        for (std::size_t id = 0; id < g.size(); ++id) {
            double m = u.magnitude(id);
            cf.v[id] = m * m * m + std::pow(std::abs(pr.p.v[id]), 1.5);
        }
        cubic_fields.push_back(cf);
        g_cells.push_back(scale_optimal_G(u, profile, y_levels, -1.0));
    }

    ScanReport rep;
    rep.s = s;
    rep.radii = radii;
    rep.dimension_bound = (15.0 - 2.0 * s - 8.0 * s * s) / 3.0;

    auto eval_cylinder = [&](const CylinderSpec& spec) {
        CylinderReport cr;
        cr.spec = spec;
        double t0 = spec.t - std::pow(spec.r, 2.0 * s);
        // frame range covering (t0, t]
        std::size_t i1 = traj.times.size() - 1;
        while (i1 > 0 && traj.times[i1] > spec.t + 1e-12) --i1;
        std::size_t i0 = i1;
        while (i0 > 0 && traj.times[i0 - 1] >= t0 - 1e-12) --i0;
        if (i0 == i1) i0 = i1 - 1;
        std::vector<double> tw = trapezoid_weights(traj.times, i0, i1);

        for (std::size_t i = i0; i <= i1; ++i) {
            double w = tw[i - i0];
            cr.f_integral += w * ball_integral(f_fields[i], spec.x, spec.r);
            cr.cubic += w * ball_integral(cubic_fields[i], spec.x, spec.r);
            // extension energy restricted to y < r
            double ge = 0.0;
            double y_lo = 0.0;
            for (std::size_t lev = 0; lev < y_levels.size() && y_lo < spec.r; ++lev) {
                ge += ball_integral(g_cells[i][lev], spec.x, spec.r);
                y_lo = y_levels[lev];
            }
            cr.extension_energy += w * ge;
            double slo = 0.0;
            for (int c = 0; c < 3; ++c)
                slo += sobolev_slobodeckij_seminorm(traj.frames[i].component(c), s, 2.0,
                                                   Ball{spec.x, spec.r});
            cr.slobodeckij += w * slo;
        }
        cr.rescaled_sum =
            (cr.extension_energy + cr.slobodeckij + cr.f_integral) /
                std::pow(spec.r, 5.0 - 4.0 * s) +
            cr.cubic / std::pow(spec.r, 6.0 - 4.0 * s);
        return cr;
    };

    // disjoint probe lattice per rung: spacing 2r (capped at 3 probes/axis)
    std::vector<std::vector<CylinderSpec>> lattice(radii.size());
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
        double r = radii[ri];
        int per_axis = std::min(3, int(g.L / (2.0 * r)));
        per_axis = std::max(per_axis, 1);
        double spacing = g.L / per_axis;
        for (int k = 0; k < per_axis; ++k)
            for (int j = 0; j < per_axis; ++j)
                for (int i = 0; i < per_axis; ++i)
                    lattice[ri].push_back(
                        {{(i + 0.5) * spacing, (j + 0.5) * spacing, (k + 0.5) * spacing},
                         t_max,
                         r});
    }

    double max_sum = 0.0;
    for (std::size_t ri = 0; ri < radii.size(); ++ri)
        for (const CylinderSpec& spec : lattice[ri]) {
            rep.cylinders.push_back(eval_cylinder(spec));
            max_sum = std::max(max_sum, rep.cylinders.back().rescaled_sum);
        }
    rep.eps = eps > 0.0 ? eps : 2.0 * max_sum;
    if (rep.eps == 0.0) rep.eps = 1.0;  // zero trajectory: any positive eps works

    rep.bad_count.assign(radii.size(), 0);
    std::size_t at = 0;
    for (std::size_t ri = 0; ri < radii.size(); ++ri)
        for (std::size_t k = 0; k < lattice[ri].size(); ++k, ++at) {
            rep.cylinders[at].small = rep.cylinders[at].rescaled_sum <= rep.eps;
            if (!rep.cylinders[at].small) ++rep.bad_count[ri];
        }

    // log-log slope of M'(r) against 1/r over rungs with nonzero counts
    std::vector<double> xs, ys;
    for (std::size_t ri = 0; ri < radii.size(); ++ri)
        if (rep.bad_count[ri] > 0) {
            xs.push_back(std::log(1.0 / radii[ri]));
            ys.push_back(std::log(double(rep.bad_count[ri])));
        }
    if (xs.size() >= 2) {
        double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        rep.slope = den > 0.0 ? num / den : 0.0;
    }
    return rep;
}

VectorField mollified_velocity(const VectorField& u, double lambda) {
    const TorusGrid& g = u.grid;
    if (!(lambda >= g.spacing() && lambda < 0.5 * g.L))
        throw std::invalid_argument("mollified_velocity: lambda outside [h, L/2)");
    ScalarField kernel(g);
    double mass = 0.0;
    for (std::size_t id = 0; id < g.size(); ++id) {
        auto c = g.coords(id);
        double d0 = g.wrap(g.x(c[0])), d1 = g.wrap(g.x(c[1])), d2 = g.wrap(g.x(c[2]));
        double r = std::sqrt(d0 * d0 + d1 * d1 + d2 * d2) / lambda;
        kernel.v[id] = psi_bump(r) / (lambda * lambda * lambda);
        mass += kernel.v[id];
    }
    double h3 = std::pow(g.spacing(), 3);
    mass *= h3;  // discrete integral; divides out so the mollifier has mean 1
    VectorField out(g);
    for (int c = 0; c < 3; ++c) {
        ScalarField conv = convolve_periodic(u.component(c), kernel);
        for (double& v : conv.v) v *= h3 / mass;
        out.set_component(c, conv);
    }
    return out;
}

namespace {

// spectral 2x upsampling for the interpolation lattice (smooth velocity
// fields; Nyquist content negligible, plane dropped)
ScalarField upsample2_interp(const ScalarField& f) {
    const TorusGrid& g = f.grid;
    TorusGrid g2(2 * g.n, g.L);
    SpectralField a = fourier_forward(f);
    SpectralField b(g2);
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                int mi = g.mode(i), mj = g.mode(j), mk = g.mode(k);
                if (std::abs(mi) >= g.n / 2 || std::abs(mj) >= g.n / 2 ||
                    std::abs(mk) >= g.n / 2)
                    continue;
                auto wrap = [&](int m) { return m < 0 ? m + g2.n : m; };
                b.c[g2.idx(wrap(mi), wrap(mj), wrap(mk))] = a.c[g.idx(i, j, k)];
            }
    return fourier_inverse(b);
}

double catmull_rom(double pm1, double p0, double p1, double p2, double t) {
    return 0.5 * ((2.0 * p0) + (-pm1 + p1) * t + (2.0 * pm1 - 5.0 * p0 + 4.0 * p1 - p2) * t * t +
                  (-pm1 + 3.0 * p0 - 3.0 * p1 + p2) * t * t * t);
}

// periodic tricubic (Catmull-Rom) interpolation on a fine lattice
double tricubic(const ScalarField& f, const std::array<double, 3>& x) {
    const TorusGrid& g = f.grid;
    double h = g.spacing();
    int base[3];
    double frac[3];
    for (int a = 0; a < 3; ++a) {
        double q = x[a] / h;
        double fl = std::floor(q);
        base[a] = int(fl);
        frac[a] = q - fl;
    }
    auto wrapi = [&](int i) {
        i %= g.n;
        return i < 0 ? i + g.n : i;
    };
    double cz[4];
    for (int dk = -1; dk <= 2; ++dk) {
        double cy[4];
        for (int dj = -1; dj <= 2; ++dj) {
            double cx[4];
            for (int di = -1; di <= 2; ++di)
                cx[di + 1] = f(wrapi(base[0] + di), wrapi(base[1] + dj),
                               wrapi(base[2] + dk));
            cy[dj + 1] = catmull_rom(cx[0], cx[1], cx[2], cx[3], frac[0]);
        }
        cz[dk + 1] = catmull_rom(cy[0], cy[1], cy[2], cy[3], frac[1]);
    }
    return catmull_rom(cz[0], cz[1], cz[2], cz[3], frac[2]);
}

struct MollifiedFrames {
    std::vector<std::array<ScalarField, 3>> fine;  // per frame, per component
    const std::vector<double>* times = nullptr;

    std::array<double, 3> velocity(const std::array<double, 3>& x, double tau) const {
        const std::vector<double>& t = *times;
        std::size_t i1 = t.size() - 1;
        while (i1 > 0 && t[i1 - 1] >= tau) --i1;
        std::size_t i0 = i1 > 0 ? i1 - 1 : 0;
        double w = (i0 == i1 || t[i1] == t[i0])
                       ? 0.0
                       : std::clamp((tau - t[i0]) / (t[i1] - t[i0]), 0.0, 1.0);
        std::array<double, 3> v{};
        for (int c = 0; c < 3; ++c) {
            double a = tricubic(fine[i0][std::size_t(c)], x);
            double b = tricubic(fine[i1][std::size_t(c)], x);
            v[std::size_t(c)] = (1.0 - w) * a + w * b;
        }
        return v;
    }
};

MollifiedFrames mollify_all(const Trajectory& traj, double lambda) {
    MollifiedFrames mf;
    mf.times = &traj.times;
    for (const VectorField& u : traj.frames) {
        VectorField m = mollified_velocity(u, lambda);
        mf.fine.push_back({upsample2_interp(m.component(0)),
                           upsample2_interp(m.component(1)),
                           upsample2_interp(m.component(2))});
    }
    return mf;
}

}  // namespace

FlowPaths flow_map(const Trajectory& traj, double lambda,
                   const std::vector<std::array<double, 3>>& seeds, double t,
                   double tau_end, int steps) {
    if (!(steps > 0)) throw std::invalid_argument("flow_map: steps must be positive");
    if (!(tau_end < t)) throw std::invalid_argument("flow_map: tau_end must precede t");
    if (tau_end < traj.times.front() - 1e-12 || t > traj.times.back() + 1e-12)
        throw std::invalid_argument("flow_map: window outside the trajectory span");
    MollifiedFrames mf = mollify_all(traj, lambda);
    double dtau = (tau_end - t) / steps;  // negative: backward integration

    FlowPaths out;
    out.tau.resize(std::size_t(steps) + 1);
    for (int k = 0; k <= steps; ++k) out.tau[std::size_t(k)] = t + k * dtau;
    out.pos.assign(seeds.size(), {});

    for (std::size_t sdx = 0; sdx < seeds.size(); ++sdx) {
        std::array<double, 3> x = seeds[sdx];
        out.pos[sdx].push_back(x);
        for (int k = 0; k < steps; ++k) {
            double tau = out.tau[std::size_t(k)];
            auto add = [](const std::array<double, 3>& p, const std::array<double, 3>& v,
                          double f) {
                return std::array<double, 3>{p[0] + f * v[0], p[1] + f * v[1],
                                             p[2] + f * v[2]};
            };
            std::array<double, 3> k1 = mf.velocity(x, tau);
            std::array<double, 3> k2 = mf.velocity(add(x, k1, 0.5 * dtau), tau + 0.5 * dtau);
            std::array<double, 3> k3 = mf.velocity(add(x, k2, 0.5 * dtau), tau + 0.5 * dtau);
            std::array<double, 3> k4 = mf.velocity(add(x, k3, dtau), tau + dtau);
            for (int a = 0; a < 3; ++a)
                x[std::size_t(a)] += dtau / 6.0 *
                                     (k1[std::size_t(a)] + 2.0 * k2[std::size_t(a)] +
                                      2.0 * k3[std::size_t(a)] + k4[std::size_t(a)]);
            for (int a = 0; a < 3; ++a) {
                double L = traj.grid.L;
                double& c = x[std::size_t(a)];
                c -= L * std::floor(c / L);
                if (!std::isfinite(c))
                    throw std::runtime_error("flow_map: interpolation failure");
            }
            out.pos[sdx].push_back(x);
        }
    }
    return out;
}

double flow_volume_defect(const Trajectory& traj, double lambda,
                          const std::vector<std::array<double, 3>>& centers, double edge,
                          double t, double tau_end, int steps) {
    if (centers.empty() || !(edge > 0.0))
        throw std::invalid_argument("flow_volume_defect: need centers and a positive edge");
    std::vector<std::array<double, 3>> seeds;
    for (const auto& c : centers)
        for (int a = 0; a < 3; ++a)
            for (double sgn : {-0.5, 0.5}) {
                std::array<double, 3> p = c;
                p[std::size_t(a)] += sgn * edge;
                seeds.push_back(p);
            }
    FlowPaths paths = flow_map(traj, lambda, seeds, t, tau_end, steps);
    const TorusGrid& g = traj.grid;
    auto det3 = [](const std::array<double, 3>& a, const std::array<double, 3>& b,
                   const std::array<double, 3>& c) {
        return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
               a[2] * (b[0] * c[1] - b[1] * c[0]);
    };
    double worst = 0.0;
    for (std::size_t q = 0; q < centers.size(); ++q) {
        std::array<std::array<double, 3>, 3> col;
        for (int a = 0; a < 3; ++a) {
            const auto& lo = paths.pos[6 * q + 2 * std::size_t(a)].back();
            const auto& hi = paths.pos[6 * q + 2 * std::size_t(a) + 1].back();
            for (int b = 0; b < 3; ++b)
                col[std::size_t(a)][std::size_t(b)] =
                    g.wrap(hi[std::size_t(b)] - lo[std::size_t(b)]) / edge;
        }
        worst = std::max(worst, std::abs(std::abs(det3(col[0], col[1], col[2])) - 1.0));
    }
    return worst;
}

std::vector<LevelsetRow> levelset_bound_check(const Trajectory& traj, double s,
                                              const std::vector<double>& lambdas, int n,
                                              double c0) {
    if (n != 1 && n != 2)
        throw std::invalid_argument("levelset_bound_check: n must be 1 or 2");
    if (traj.frames.empty())
        throw std::invalid_argument("levelset_bound_check: empty trajectory");
    const TorusGrid& g = traj.grid;
    double t = traj.times.back();
    for (double lam : lambdas)
        if (t - std::pow(5.0 * lam, 2.0 * s) < traj.times.front())
            throw std::invalid_argument("levelset_bound_check: ladder exceeds time span");

    ScalarField mag = derivative_magnitude(traj.frames.back(), n);
    double h3 = std::pow(g.spacing(), 3);
    if (c0 <= 0.0) {
        double vmax = 0.0, lam_max = 0.0;
        for (double v : mag.v) vmax = std::max(vmax, v);
        for (double lam : lambdas) lam_max = std::max(lam_max, lam);
        c0 = 0.3 * vmax * std::pow(lam_max, 2.0 * s + double(n) - 1.0);
        if (c0 == 0.0) c0 = 1.0;  // zero field: any constant works
    }

    // per-frame F densities for the probe H values
    ExtensionProfile profile = build_profile(s);
    std::vector<double> y_levels = make_y_levels(g, 24);
    std::vector<ScalarField> f_fields;
    std::vector<std::vector<ScalarField>> g_cells;
    for (const VectorField& u : traj.frames) {
        PressurePair pr = solve_pressure(u);
        f_fields.push_back(scale_optimal_F(u, pr, s).total);
        g_cells.push_back(scale_optimal_G(u, profile, y_levels, -1.0));
    }

    std::vector<LevelsetRow> rows;
    for (double lam : lambdas) {
        LevelsetRow row;
        row.lambda = lam;
        row.threshold = c0 * std::pow(lam, -(2.0 * s + double(n) - 1.0));
        std::size_t count = 0;
        for (double v : mag.v)
            if (v >= row.threshold) ++count;
        row.level_measure = double(count) * h3;

        double tau0 = t - std::pow(5.0 * lam, 2.0 * s);
        // cumulative dissipation is 2 int ||Lambda^s u||^2; interpolate at tau0
        auto diss_at = [&](double tau) {
            std::size_t i = traj.times.size() - 1;
            while (i > 0 && traj.times[i - 1] >= tau) --i;
            if (i == 0) return traj.dissipation.front();
            double w = (tau - traj.times[i - 1]) / (traj.times[i] - traj.times[i - 1]);
            return (1.0 - w) * traj.dissipation[i - 1] + w * traj.dissipation[i];
        };
        row.slab_dissipation = 0.5 * (diss_at(t) - diss_at(tau0));
        double denom = std::pow(lam, 6.0 * s - 2.0) * row.slab_dissipation;
        row.ratio = denom > 0.0 ? row.level_measure / denom
                                : (row.level_measure > 0.0
                                       ? std::numeric_limits<double>::infinity()
                                       : 0.0);
        row.h_scale = std::pow(lam, 5.0 - 4.0 * s);

        // H on a small probe set: backward flow, then ball integrals of F, G
        // and the Slobodeckij term around the moving center
        double ball_r = std::min(5.0 * lam, g.L / 4.0);
        std::vector<std::array<double, 3>> probes;
        for (int pz = 0; pz < 2; ++pz)
            for (int py = 0; py < 2; ++py)
                for (int px = 0; px < 2; ++px)
                    probes.push_back({(px + 0.5) * g.L / 2.0, (py + 0.5) * g.L / 2.0,
                                      (pz + 0.5) * g.L / 2.0});
        int steps = 8;
        FlowPaths paths = flow_map(traj, std::max(lam, g.spacing()), probes, t, tau0, steps);
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            double acc = 0.0;
            std::vector<double> tw = trapezoid_weights(paths.tau, 0, paths.tau.size() - 1);
            for (std::size_t k = 0; k < paths.tau.size(); ++k) {
                double tau = paths.tau[k];
                std::size_t fi = traj.times.size() - 1;
                while (fi > 0 && traj.times[fi - 1] >= tau) --fi;
                const std::array<double, 3>& c = paths.pos[pi][k];
                double term = ball_integral(f_fields[fi], c, ball_r);
                double y_lo = 0.0;
                for (std::size_t lev = 0; lev < y_levels.size() && y_lo < ball_r; ++lev) {
                    term += ball_integral(g_cells[fi][lev], c, ball_r);
                    y_lo = y_levels[lev];
                }
                for (int cc = 0; cc < 3; ++cc)
                    term += sobolev_slobodeckij_seminorm(traj.frames[fi].component(cc), s,
                                                         2.0, Ball{c, ball_r});
                acc += std::abs(tw[k]) * term;
            }
            row.h_max = std::max(row.h_max, acc);
        }
        rows.push_back(row);
    }
    return rows;
}

double derivative_exponent(double s, int n) {
    if (n != 1 && n != 2)
        throw std::invalid_argument("derivative_exponent: n must be 1 or 2");
    if (!(s >= 0.75 && s <= 1.0))
        throw std::invalid_argument("derivative_exponent: s must lie in [3/4, 1]");
    return 2.0 * (3.0 * s - 1.0) / (double(n) + 2.0 * s - 1.0);
}

std::pair<double, double> dimension_bounds(double s) {
    if (!(s >= 0.75 && s <= 1.0))
        throw std::invalid_argument("dimension_bounds: s must lie in [3/4, 1]");
    return {(15.0 - 2.0 * s - 8.0 * s * s) / 3.0,
            (-16.0 * s * s + 16.0 * s + 5.0) / 3.0};
}

double apriori_weak_lp_check(const Trajectory& traj, int n, double t0, const Ball& region) {
    double s = traj.config.s;
    double p = derivative_exponent(s, n);
    std::vector<ScalarField> slices;
    std::vector<double> times;
    for (std::size_t i = 0; i < traj.frames.size(); ++i)
        if (traj.times[i] >= t0) {
            slices.push_back(derivative_magnitude(traj.frames[i], n));
            times.push_back(traj.times[i]);
        }
    if (slices.empty())
        throw std::invalid_argument("apriori_weak_lp_check: no frames past t0");
    double e0 = traj.energy.front();  // ||u0||_2^2
    double volK = ball_volume_on_grid(traj.grid, region);
    double denom = e0 + volK * std::pow(t0, -(2.0 - 1.0 / s));
    if (denom == 0.0) return 0.0;
    WeakLpResult w = weak_lp_norm_spacetime(slices, times, p, region);
    return std::pow(w.c, p) / denom;
}

}  // namespace fracns
