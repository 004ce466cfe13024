#include "fracns/solver.hpp"

#include <cmath>
#include <cstdio>

namespace fracns {

VectorField leray_project(const VectorField& u) {
    const TorusGrid& g = u.grid;
    std::array<SpectralField, 3> spec;
    for (int c = 0; c < 3; ++c) spec[c] = fourier_forward(u.component(c));
    VectorField out(g);
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                std::size_t id = g.idx(i, j, k);
                double xi[3] = {g.xi(i), g.xi(j), g.xi(k)};
                double n2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                if (n2 == 0.0) continue;
                std::complex<double> dot =
                    xi[0] * spec[0].c[id] + xi[1] * spec[1].c[id] + xi[2] * spec[2].c[id];
                for (int c = 0; c < 3; ++c) spec[c].c[id] -= xi[c] * dot / n2;
            }
    for (int c = 0; c < 3; ++c) out.set_component(c, fourier_inverse(spec[c]));
    return out;
}

VectorField random_divfree_field(const TorusGrid& g, double k1, double k2,
                                 std::uint64_t seed) {
    VectorField u(g);
    for (int c = 0; c < 3; ++c)
        u.comp[c] = random_band_scalar(g, k1, k2, seed + 1000003ull * (c + 1)).v;
    u = leray_project(u);
    double norm = l2_norm(u);
    if (norm > 0.0)
        for (int c = 0; c < 3; ++c)
            for (double& v : u.comp[c]) v /= norm;
    return u;
}

VectorField convective_term(const VectorField& u) {
    const TorusGrid& g = u.grid;
    VectorField out(g);
    std::array<SpectralField, 3> spec;
    for (int c = 0; c < 3; ++c) spec[c] = fourier_forward(u.component(c));
    // d_j u_i in physical space
    std::array<std::array<ScalarField, 3>, 3> du;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            SpectralField d = spec[i];
            apply_multiplier_inplace(
                d,
                [j](double x1, double x2, double x3) {
                    double xi[3] = {x1, x2, x3};
                    return std::complex<double>(0.0, xi[j]);
                },
                false, true);
            du[i][j] = fourier_inverse(d);
        }
    for (int i = 0; i < 3; ++i) {
        ScalarField acc(g);
        for (int j = 0; j < 3; ++j)
            for (std::size_t m = 0; m < g.size(); ++m)
                acc.v[m] += u.comp[j][m] * du[i][j].v[m];
        out.comp[i] = dealias(acc).v;
    }
    return -1.0 * leray_project(out);
}

namespace {

// phi functions of the exponential integrators, stable for z <= 0
double phi1(double z) {
    if (std::abs(z) < 0.25) {
        double acc = 0.0, term = 1.0;
        for (int k = 1; k <= 14; ++k) {
            acc += term;
            term *= z / (k + 1);
        }
        return acc;
    }
    return std::expm1(z) / z;
}
double phi2(double z) {
    if (std::abs(z) < 0.25) {
        double acc = 0.0, term = 0.5;
        for (int k = 2; k <= 15; ++k) {
            acc += term;
            term *= z / (k + 1);
        }
        return acc;
    }
    return (std::expm1(z) - z) / (z * z);
}
double phi3(double z) {
    if (std::abs(z) < 0.25) {
        double acc = 0.0, term = 1.0 / 6.0;
        for (int k = 3; k <= 16; ++k) {
            acc += term;
            term *= z / (k + 1);
        }
        return acc;
    }
    return (std::expm1(z) - z - 0.5 * z * z) / (z * z * z);
}

struct EtdTables {
    // per-mode: e^{z}, dt*phi1(z), dt*phi2(z) and (for RK4) half-step tables
    std::vector<double> ez, p1, p2;
    std::vector<double> ez2, p1h;          // half step
    std::vector<double> a4, b4, c4;        // Cox-Matthews weights * dt
};

EtdTables make_tables(const TorusGrid& g, double dt, double s, Integrator integrator) {
    EtdTables t;
    std::size_t n = g.size();
    t.ez.resize(n);
    t.p1.resize(n);
    t.p2.resize(n);
    bool rk4 = integrator == Integrator::etd_rk4;
    if (rk4) {
        t.ez2.resize(n);
        t.p1h.resize(n);
        t.a4.resize(n);
        t.b4.resize(n);
        t.c4.resize(n);
    }
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                std::size_t id = g.idx(i, j, k);
                double x1 = g.xi(i), x2 = g.xi(j), x3 = g.xi(k);
                double n2 = x1 * x1 + x2 * x2 + x3 * x3;
                double z = -dt * std::pow(n2, s);
                if (n2 == 0.0) z = 0.0;
                t.ez[id] = std::exp(z);
                t.p1[id] = dt * phi1(z);
                t.p2[id] = dt * phi2(z);
                if (rk4) {
                    t.ez2[id] = std::exp(0.5 * z);
                    t.p1h[id] = 0.5 * dt * phi1(0.5 * z);
                    double f1 = phi1(z), f2 = phi2(z), f3 = phi3(z);
                    t.a4[id] = dt * (f1 - 3.0 * f2 + 4.0 * f3);
                    t.b4[id] = dt * (2.0 * f2 - 4.0 * f3);
                    t.c4[id] = dt * (4.0 * f3 - f2);
                }
            }
    return t;
}

using SpecVec = std::array<SpectralField, 3>;

SpecVec to_spec(const VectorField& u) {
    SpecVec s;
    for (int c = 0; c < 3; ++c) s[c] = fourier_forward(u.component(c));
    return s;
}
VectorField to_phys(const SpecVec& s) {
    VectorField u(s[0].grid);
    for (int c = 0; c < 3; ++c) u.set_component(c, fourier_inverse(s[c]));
    return u;
}
SpecVec nonlinear_spec(const VectorField& u, bool nonlinear) {
    if (!nonlinear) {
        SpecVec z;
        for (int c = 0; c < 3; ++c) z[c] = SpectralField(u.grid);
        return z;
    }
    return to_spec(convective_term(u));
}

VectorField step_impl(const VectorField& u, const EtdTables& t, Integrator integrator,
                      bool nonlinear) {
    SpecVec us = to_spec(u);
    std::size_t n = u.grid.size();
    if (integrator == Integrator::etd_rk2) {
        SpecVec nu = nonlinear_spec(u, nonlinear);
        SpecVec as;
        for (int c = 0; c < 3; ++c) {
            as[c] = SpectralField(u.grid);
            for (std::size_t m = 0; m < n; ++m)
                as[c].c[m] = t.ez[m] * us[c].c[m] + t.p1[m] * nu[c].c[m];
        }
        VectorField a = to_phys(as);
        SpecVec na = nonlinear_spec(a, nonlinear);
        for (int c = 0; c < 3; ++c)
            for (std::size_t m = 0; m < n; ++m)
                as[c].c[m] += t.p2[m] * (na[c].c[m] - nu[c].c[m]);
        return to_phys(as);
    }
    // Cox-Matthews ETD-RK4
    SpecVec nu = nonlinear_spec(u, nonlinear);
    SpecVec tmp;
    for (int c = 0; c < 3; ++c) {
        tmp[c] = SpectralField(u.grid);
        for (std::size_t m = 0; m < n; ++m)
            tmp[c].c[m] = t.ez2[m] * us[c].c[m] + t.p1h[m] * nu[c].c[m];
    }
    VectorField a = to_phys(tmp);
    SpecVec na = nonlinear_spec(a, nonlinear);
    for (int c = 0; c < 3; ++c)
        for (std::size_t m = 0; m < n; ++m)
            tmp[c].c[m] = t.ez2[m] * us[c].c[m] + t.p1h[m] * na[c].c[m];
    VectorField b = to_phys(tmp);
    SpecVec nb = nonlinear_spec(b, nonlinear);
    SpecVec asp = to_spec(a);
    for (int c = 0; c < 3; ++c)
        for (std::size_t m = 0; m < n; ++m)
            tmp[c].c[m] = t.ez2[m] * asp[c].c[m] + t.p1h[m] * (2.0 * nb[c].c[m] - nu[c].c[m]);
    VectorField cfield = to_phys(tmp);
    SpecVec nc = nonlinear_spec(cfield, nonlinear);
    for (int c = 0; c < 3; ++c)
        for (std::size_t m = 0; m < n; ++m)
            tmp[c].c[m] = t.ez[m] * us[c].c[m] + t.a4[m] * nu[c].c[m] +
                          t.b4[m] * (na[c].c[m] + nb[c].c[m]) + t.c4[m] * nc[c].c[m];
    return to_phys(tmp);
}

double dissipation_rate(const VectorField& u, double s) {
    double d = 0.0;
    for (int c = 0; c < 3; ++c) {
        ScalarField f = u.component(c);
        d += std::pow(l2_norm(fractional_laplacian(f, s)), 2);
    }
    return 2.0 * d;
}

}  // namespace

VectorField step(const VectorField& u, double dt, double s, Integrator integrator,
                 bool nonlinear) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    EtdTables t = make_tables(u.grid, dt, s, integrator);
    return step_impl(u, t, integrator, nonlinear);
}

double Trajectory::energy_residual(std::size_t i) const {
    return std::abs(energy.at(i) + dissipation.at(i) - energy.at(0));
}

Trajectory run(const SolverConfig& config, const TorusGrid& g, const VectorField& u0) {
    require_same_grid(g, u0.grid);
    if (!(config.dt > 0.0) || !(config.t_end >= 0.0))
        throw std::invalid_argument("run: dt must be positive and t_end nonnegative");
    double unorm = l2_norm(u0);
    if (l2_norm(divergence(u0)) > 1e-8 * std::max(1.0, unorm))
        throw std::invalid_argument("run: initial data is not divergence-free");
    for (int c = 0; c < 3; ++c) {
        double m = mean(u0.component(c));
        if (std::abs(m) > 1e-10 * std::max(1.0, unorm))
            throw std::invalid_argument("run: initial data must have zero mean");
    }

    Trajectory traj;
    traj.grid = g;
    traj.config = config;

    VectorField u = u0;
    double t = 0.0;
    double diss_acc = 0.0;
    double rate_prev = dissipation_rate(u, config.s);
    auto record = [&]() {
        traj.times.push_back(t);
        traj.frames.push_back(u);
        traj.energy.push_back(std::pow(l2_norm(u), 2));
        traj.dissipation.push_back(diss_acc);
    };
    record();

    EtdTables tables = make_tables(g, config.dt, config.s, config.integrator);
    double tables_dt = config.dt;
    bool warned = false;
    const double h = g.spacing();
    long step_index = 0;
    while (t < config.t_end - 1e-14 * std::max(1.0, config.t_end)) {
        double dt_eff = std::min(config.dt, config.t_end - t);
        if (config.adapt_cfl) {
            double umax = 0.0;
            for (std::size_t m = 0; m < g.size(); ++m) umax = std::max(umax, u.magnitude(m));
            if (umax > 0.0) {
                double dt_cfl = 0.5 * h / umax;
                if (dt_eff > dt_cfl) {
                    if (!warned) {
                        std::fprintf(stderr,
                                     "run: dt %.3g exceeds the advective limit %.3g; "
                                     "shrinking steps\n",
                                     dt_eff, dt_cfl);
                        warned = true;
                    }
                    dt_eff = dt_cfl;
                }
            }
        }
        if (dt_eff != tables_dt) {
            tables = make_tables(g, dt_eff, config.s, config.integrator);
            tables_dt = dt_eff;
        }
        u = step_impl(u, tables, config.integrator, config.nonlinear);
        t += dt_eff;
        ++step_index;
        double e = std::pow(l2_norm(u), 2);
        if (!std::isfinite(e)) throw std::runtime_error("run: solution blew up (NaN/overflow)");
        double rate = dissipation_rate(u, config.s);
        diss_acc += 0.5 * dt_eff * (rate_prev + rate);
        rate_prev = rate;
        bool last = !(t < config.t_end - 1e-14 * std::max(1.0, config.t_end));
        if (last || (config.output_every > 0 && step_index % config.output_every == 0))
            record();
    }
    return traj;
}

VectorField make_initial(const TorusGrid& g, InitialKind kind, const InitialParams& params) {
    switch (kind) {
        case InitialKind::taylor_green: {
            VectorField u(g);
            double w = 2.0 * M_PI / g.L;  // fundamental mode on the box
            u.set_component(0, ScalarField(g, [&](double x, double y, double) {
                                return params.amplitude * std::cos(w * x) * std::sin(w * y);
                            }));
            u.set_component(1, ScalarField(g, [&](double x, double y, double) {
                                return -params.amplitude * std::sin(w * x) * std::cos(w * y);
                            }));
            return u;
        }
        case InitialKind::random_band: {
            if (!(params.k1 >= 1.0) || !(params.k2 >= params.k1) || params.k2 > g.n / 2.0)
                throw std::invalid_argument("make_initial: bad shell range");
            VectorField u(g);
            for (int c = 0; c < 3; ++c)
                u.comp[c] =
                    random_band_scalar(g, params.k1, params.k2,
                                       params.seed + 1000003ull * (c + 1))
                        .v;
            // impose the spectral slope |mode|^slope inside the shell
            if (params.slope != 0.0) {
                for (int c = 0; c < 3; ++c) {
                    SpectralField s = fourier_forward(u.component(c));
                    for (int k = 0; k < g.n; ++k)
                        for (int j = 0; j < g.n; ++j)
                            for (int i = 0; i < g.n; ++i) {
                                double m2 = double(g.mode(i)) * g.mode(i) +
                                            double(g.mode(j)) * g.mode(j) +
                                            double(g.mode(k)) * g.mode(k);
                                if (m2 > 0.0)
                                    s.c[g.idx(i, j, k)] *=
                                        std::pow(m2, 0.5 * params.slope);
                            }
                    u.set_component(c, fourier_inverse(s));
                }
            }
            u = leray_project(u);
            double norm = l2_norm(u);
            if (norm > 0.0)
                for (int c = 0; c < 3; ++c)
                    for (double& v : u.comp[c]) v *= params.amplitude / norm;
            return u;
        }
        case InitialKind::localized_bump: {
            // curl of a localized stream function (0,0,psi): divergence-free
            // and compactly concentrated
            std::array<double, 3> c{g.L / 2, g.L / 2, g.L / 2};
            double w = params.width;
            ScalarField psi = sample_radial(
                g, c, [&](double r) { return std::exp(-r * r / (2.0 * w * w)); });
            VectorField u(g);
            u.set_component(0, derivative(psi, 2));
            u.set_component(1, -1.0 * derivative(psi, 1));
            double norm = l2_norm(u);
            if (norm > 0.0)
                for (int cc = 0; cc < 3; ++cc)
                    for (double& v : u.comp[cc]) v *= params.amplitude / norm;
            return u;
        }
    }
    throw std::invalid_argument("make_initial: unknown kind");
}

namespace {

bool is_power_of_two(double lambda) {
    if (!(lambda > 0.0)) return false;
    double l2 = std::log2(lambda);
    return std::abs(l2 - std::round(l2)) < 1e-12;
}

}  // namespace

VectorField rescale_field(const VectorField& u, double lambda, double s,
                          TorusGrid* out_grid) {
    if (!is_power_of_two(lambda))
        throw std::invalid_argument("rescale_field: lambda must be a power of two");
    TorusGrid g2(u.grid.n, u.grid.L / lambda);
    if (out_grid) *out_grid = g2;
    // u_lambda(x) = lambda^{2s-1} u(lambda x): the sample grids coincide
    VectorField out(g2);
    double amp = std::pow(lambda, 2.0 * s - 1.0);
    for (int c = 0; c < 3; ++c)
        for (std::size_t m = 0; m < g2.size(); ++m) out.comp[c][m] = amp * u.comp[c][m];
    return out;
}

Trajectory rescale_solution(const Trajectory& traj, double lambda) {
    if (!is_power_of_two(lambda))
        throw std::invalid_argument("rescale_solution: lambda must be a power of two");
    double s = traj.config.s;
    Trajectory out;
    out.config = traj.config;
    double tscale = std::pow(lambda, -2.0 * s);
    out.config.dt = traj.config.dt * tscale;
    out.config.t_end = traj.config.t_end * tscale;
    TorusGrid g2;
    for (std::size_t f = 0; f < traj.frames.size(); ++f) {
        VectorField uf = rescale_field(traj.frames[f], lambda, s, &g2);
        out.grid = g2;
        out.times.push_back(traj.times[f] * tscale);
        out.energy.push_back(std::pow(l2_norm(uf), 2));
        // dissipation integral scales like the energy
        out.dissipation.push_back(traj.dissipation[f] * std::pow(lambda, 4.0 * s - 5.0));
        out.frames.push_back(std::move(uf));
    }
    return out;
}

double check_scaling_equivariance(const SolverConfig& config, const TorusGrid& g,
                                  const VectorField& u0, double lambda) {
    // route A: solve, then rescale the final frame
    Trajectory ta = run(config, g, u0);
    VectorField a = rescale_field(ta.frames.back(), lambda, config.s, nullptr);

    // route B: rescale the data, solve on the rescaled clock with the same dt
    TorusGrid g2;
    VectorField v0 = rescale_field(u0, lambda, config.s, &g2);
    SolverConfig cb = config;
    cb.t_end = config.t_end * std::pow(lambda, -2.0 * config.s);
    Trajectory tb = run(cb, g2, v0);
    return rel_l2_error(tb.frames.back(), a);
}

ScalarField translate(const ScalarField& f, const std::array<double, 3>& shift) {
    SpectralField s = fourier_forward(f);
    const TorusGrid& g = f.grid;
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                double phase = g.xi(i) * shift[0] + g.xi(j) * shift[1] + g.xi(k) * shift[2];
                s.c[g.idx(i, j, k)] *= std::complex<double>(std::cos(phase), -std::sin(phase));
            }
    return fourier_inverse(s);
}

VectorField translate(const VectorField& u, const std::array<double, 3>& shift) {
    VectorField out(u.grid);
    for (int c = 0; c < 3; ++c) out.set_component(c, translate(u.component(c), shift));
    return out;
}

Trajectory galilean_shift(const Trajectory& traj, const Path& c, const Path& cprime) {
    Trajectory out = traj;
    for (std::size_t f = 0; f < traj.frames.size(); ++f) {
        double t = traj.times[f];
        std::array<double, 3> ct = c(t), vt = cprime(t);
        VectorField u = translate(traj.frames[f], ct);
        for (int comp = 0; comp < 3; ++comp)
            for (double& v : u.comp[comp]) v += vt[comp];
        out.energy[f] = std::pow(l2_norm(u), 2);
        out.frames[f] = std::move(u);
    }
    return out;
}

double equation_residual(const VectorField& ua, const VectorField& ub, double dt, double s) {
    require_same_grid(ua.grid, ub.grid);
    if (!(dt > 0.0)) throw std::invalid_argument("equation_residual: dt must be positive");
    const TorusGrid& g = ua.grid;
    VectorField mid = 0.5 * (ua + ub);
    VectorField nl = convective_term(mid);  // -P(u.grad u), dealiased
    VectorField lap = fractional_laplacian(mid, 2.0 * s);
    VectorField res(g);
    for (int c = 0; c < 3; ++c)
        for (std::size_t m = 0; m < g.size(); ++m)
            res.comp[c][m] = (ub.comp[c][m] - ua.comp[c][m]) / dt + lap.comp[c][m] -
                             nl.comp[c][m];
    return l2_norm(res);
}

}  // namespace fracns
