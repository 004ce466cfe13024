#include "fracns/pressure.hpp"

#include <cmath>

#include "fracns/util.hpp"

namespace fracns {

namespace {

// -(xi_i xi_j / |xi|^2) multiplier applied to a scalar
ScalarField riesz_pair(const ScalarField& f, int i, int j) {
    return apply_multiplier(
        f,
        [i, j](double x1, double x2, double x3) {
            double xi[3] = {x1, x2, x3};
            double n2 = x1 * x1 + x2 * x2 + x3 * x3;
            return std::complex<double>(-xi[i] * xi[j] / n2, 0.0);
        },
        true, false);
}

// sum over ij of Rij(u_i u_j phibar-weighted products), dealiased
ScalarField riesz_contraction(const VectorField& u, const ScalarField* weight) {
    const TorusGrid& g = u.grid;
    ScalarField acc(g);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            ScalarField prod(g);
            for (std::size_t m = 0; m < g.size(); ++m) {
                prod.v[m] = u.comp[i][m] * u.comp[j][m];
                if (weight) prod.v[m] *= weight->v[m];
            }
            prod = dealias(prod);
            ScalarField piece = riesz_pair(prod, i, j);
            double mult = (i == j) ? 1.0 : 2.0;
            for (std::size_t m = 0; m < g.size(); ++m) acc.v[m] += mult * piece.v[m];
        }
    return acc;
}

// all n-fold Riesz compositions (n <= 2), worst value of fn over them
template <typename Fn>
double worst_riesz_composition(const ScalarField& base, int n, Fn&& fn) {
    if (n < 0 || n > 2) throw std::invalid_argument("Riesz order n must be 0, 1, or 2");
    if (n == 0) return fn(base);
    double worst = 0.0;
    for (int j1 = 1; j1 <= 3; ++j1) {
        ScalarField r1 = riesz_transform(base, j1);
        if (n == 1) {
            worst = std::max(worst, fn(r1));
        } else {
            for (int j2 = j1; j2 <= 3; ++j2)
                worst = std::max(worst, fn(riesz_transform(r1, j2)));
        }
    }
    return worst;
}

}  // namespace

PressurePair solve_pressure(const VectorField& u) {
    double unorm = l2_norm(u);
    double div = l2_norm(divergence(u));
    if (unorm > 0.0 && div > 1e-8 * std::max(1.0, unorm))
        throw std::invalid_argument("solve_pressure: velocity is not divergence-free");
    PressurePair out{riesz_contraction(u, nullptr), VectorField(u.grid)};
    out.grad = gradient(out.p);
    return out;
}

double pressure_hardy_ratio(const VectorField& u, int n, double s) {
    double den = std::pow(l2_norm(fractional_laplacian(u, s)), 2);
    if (den == 0.0) return 0.0;
    ScalarField base = fractional_laplacian(solve_pressure(u).p, 2.0 * s);
    double num = worst_riesz_composition(base, n, [](const ScalarField& f) {
        return lp_norm(f, 1.0);
    });
    return num / den;
}

double decay_check(const ScalarField& g, double s, int n, double eta,
                   const std::vector<double>& probe_radii) {
    if (!(eta > 0.0 && eta < 2.0 * s))
        throw std::invalid_argument("decay_check: eta must lie in (0, 2s)");
    const TorusGrid& grid = g.grid;
    for (double r : probe_radii)
        if (!(r > 0.0) || r > grid.L / 4.0)
            throw std::invalid_argument("decay_check: probe radii must lie in (0, L/4]");
    ScalarField base = fractional_laplacian(g, 2.0 * s);
    std::array<double, 3> c{grid.L / 2.0, grid.L / 2.0, grid.L / 2.0};
    const double h = grid.spacing();
    return worst_riesz_composition(base, n, [&](const ScalarField& f) {
        double worst = 0.0;
        for (double r : probe_radii) {
            for (int k = 0; k < grid.n; ++k)
                for (int j = 0; j < grid.n; ++j)
                    for (int i = 0; i < grid.n; ++i) {
                        std::array<double, 3> x{grid.x(i), grid.x(j), grid.x(k)};
                        double d = std::sqrt(grid.dist2(x, c));
                        if (std::abs(d - r) > h) continue;
                        double w = std::pow(1.0 + d, 3.0 + eta);
                        worst = std::max(worst, std::abs(f(i, j, k)) * w);
                    }
        }
        return worst;
    });
}

PressureLocalization localize_pressure(const ScalarField& p, const VectorField& u,
                                       const ScalarField& phi, const ScalarField& phibar) {
    const TorusGrid& g = p.grid;
    require_same_grid(g, u.grid);
    require_same_grid(g, phi.grid);
    require_same_grid(g, phibar.grid);
    for (std::size_t m = 0; m < g.size(); ++m)
        if (std::abs(phi.v[m]) > 1e-12 && phibar.v[m] < 1.0 - 1e-6)
            throw std::invalid_argument(
                "localize_pressure: phibar must equal 1 on the support of phi");

    ScalarField q = riesz_contraction(u, &phibar);
    VectorField gq = gradient(q);
    VectorField gp = gradient(p);
    PressureLocalization out{VectorField(g), VectorField(g), {}};
    for (int c = 0; c < 3; ++c)
        for (std::size_t m = 0; m < g.size(); ++m) {
            out.riesz_part.comp[c][m] = phi.v[m] * gq.comp[c][m];
            out.remainder.comp[c][m] = phi.v[m] * gp.comp[c][m] - out.riesz_part.comp[c][m];
        }
    for (int k = 0; k <= 2; ++k) {
        double w = 0.0;
        for (int c = 0; c < 3; ++c) {
            ScalarField comp(g);
            comp.v = out.remainder.comp[c];
            w = std::max(w, wk_inf_norm(comp, k));
        }
        out.remainder_wk_inf[std::size_t(k)] = w;
    }
    return out;
}

double poincare_pressure_ratio(const VectorField& g, double s) {
    const TorusGrid& grid = g.grid;
    const double unit = 0.22 * grid.L / 5.0;  // radius of the "B_1" analog
    std::array<double, 3> c{grid.L / 2.0, grid.L / 2.0, grid.L / 2.0};
    Ball b54{c, 1.25 * unit};
    Ball b3{c, 3.0 * unit};
    Ball b5{c, 5.0 * unit};

    // psi: bump on the unit-analog ball, normalized to discrete mass 1
    ScalarField psi = sample_radial(grid, c, [&](double r) { return psi_bump(r / unit); });
    double h3 = std::pow(grid.spacing(), 3);
    double mass = 0.0;
    for (double v : psi.v) mass += v * h3;
    if (mass <= 0.0) throw std::invalid_argument("poincare_pressure_ratio: grid too coarse");
    for (double& v : psi.v) v /= mass;

    // numerator: || g - (g)_psi ||_{L^{6/5}} of the deviation magnitude
    ScalarField dev(grid);
    for (int comp = 0; comp < 3; ++comp) {
        double mean = 0.0;
        for (std::size_t m = 0; m < grid.size(); ++m)
            mean += g.comp[comp][m] * psi.v[m] * h3;
        for (std::size_t m = 0; m < grid.size(); ++m) {
            double d = g.comp[comp][m] - mean;
            dev.v[m] += d * d;
        }
    }
    for (double& v : dev.v) v = std::sqrt(v);
    double num = lp_norm(dev, 6.0 / 5.0, b54);

    VectorField lg = fractional_laplacian(g, 2.0 * s - 1.0);
    ScalarField lgmag(grid);
    for (std::size_t m = 0; m < grid.size(); ++m) lgmag.v[m] = lg.magnitude(m);
    double den = lp_norm(lgmag, 1.0, b5);
    static const TestFunctionFamily family = make_admissible_family();
    ScalarField gm(grid);
    for (int comp = 0; comp < 3; ++comp) {
        ScalarField f(grid);
        f.v = lg.comp[comp];
        ScalarField m = grand_max_approx(f, family);
        for (std::size_t i = 0; i < grid.size(); ++i) gm.v[i] += m.v[i] * m.v[i];
    }
    for (double& v : gm.v) v = std::sqrt(v);
    den += lp_norm(gm, 1.0, b3);

    if (den == 0.0) return 0.0;
    return num / den;
}

double wk_inf_norm(const ScalarField& f, int k) {
    if (k < 0 || k > 4) throw std::invalid_argument("wk_inf_norm: order must be in 0..4");
    double out = linf_norm(f);
    if (k == 0) return out;
    // breadth-first over multi-indices via repeated single derivatives
    std::vector<ScalarField> layer{f};
    for (int depth = 1; depth <= k; ++depth) {
        std::vector<ScalarField> next;
        for (const ScalarField& g : layer)
            for (int j = 1; j <= 3; ++j) {
                ScalarField d = derivative(g, j);
                out = std::max(out, linf_norm(d));
                next.push_back(std::move(d));
            }
        layer = std::move(next);
    }
    return out;
}

}  // namespace fracns
