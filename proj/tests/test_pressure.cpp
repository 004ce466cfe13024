#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracns/pressure.hpp"
#include "fracns/solver.hpp"
#include "fracns/util.hpp"

using namespace fracns;

namespace {

VectorField localized_divfree(const TorusGrid& g, std::uint64_t seed) {
    VectorField u = random_divfree_field(g, 1, g.n / 4.0, seed);
    std::array<double, 3> c{g.L / 2, g.L / 2, g.L / 2};
    ScalarField cut = sample_radial(g, c, [&](double r) { return lp_rho(r / (0.11 * g.L)); });
    for (int comp = 0; comp < 3; ++comp)
        for (std::size_t m = 0; m < g.size(); ++m) u.comp[comp][m] *= cut.v[m];
    u = leray_project(u);
    double norm = l2_norm(u);
    for (int comp = 0; comp < 3; ++comp)
        for (double& v : u.comp[comp]) v /= norm;
    return u;
}

VectorField taylor_green(const TorusGrid& g) {
    VectorField u(g);
    u.set_component(0, ScalarField(g, [](double x, double y, double) {
                        return std::cos(x) * std::sin(y);
                    }));
    u.set_component(1, ScalarField(g, [](double x, double y, double) {
                        return -std::sin(x) * std::cos(y);
                    }));
    return u;
}

VectorField roll(const VectorField& u, int di, int dj, int dk) {
    const TorusGrid& g = u.grid;
    VectorField out(g);
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < g.n; ++k)
            for (int j = 0; j < g.n; ++j)
                for (int i = 0; i < g.n; ++i)
                    out.comp[c][g.idx((i + di) % g.n, (j + dj) % g.n, (k + dk) % g.n)] =
                        u.comp[c][g.idx(i, j, k)];
    return out;
}

}  // namespace

TEST_CASE("pressure of simple flows") {
    TorusGrid g(32, 2.0 * M_PI);

    // shear flow: nonlinearity projects to zero pressure
    VectorField shear(g);
    shear.set_component(0, ScalarField(g, [](double, double y, double) { return std::sin(y); }));
    PressurePair ps = solve_pressure(shear);
    CHECK(linf_norm(ps.p) < 1e-12);

    // Taylor-Green
    PressurePair pt = solve_pressure(taylor_green(g));
    ScalarField want(g, [](double x, double y, double) {
        return -(std::cos(2 * x) + std::cos(2 * y)) / 4.0;
    });
    CHECK(max_abs_diff(pt.p, want) < 1e-12);
    ScalarField want_gx(g, [](double x, double, double) { return std::sin(2 * x) / 2.0; });
    CHECK(max_abs_diff(pt.grad.component(0), want_gx) < 1e-12);

    // mean-zero convention
    CHECK(std::abs(mean(pt.p)) < 1e-14);

    // quadratic homogeneity
    PressurePair p2 = solve_pressure(2.0 * taylor_green(g));
    CHECK(max_abs_diff(p2.p, 4.0 * pt.p) < 1e-11);

    // non-solenoidal input rejected
    VectorField bad(g);
    bad.set_component(0, ScalarField(g, [](double x, double, double) { return std::sin(x); }));
    CHECK_THROWS_AS(solve_pressure(bad), std::invalid_argument);
}

TEST_CASE("Poisson relation holds spectrally") {
    TorusGrid g(32, 2.0 * M_PI);
    VectorField u = random_divfree_field(g, 1, 8, 42);
    PressurePair pp = solve_pressure(u);
    ScalarField lhs = fractional_laplacian(pp.p, 2.0);  // -Laplacian p
    ScalarField rhs(g);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            ScalarField prod(g);
            for (std::size_t m = 0; m < g.size(); ++m)
                prod.v[m] = u.comp[i][m] * u.comp[j][m];
            prod = dealias(prod);
            rhs = rhs + derivative(derivative(prod, i + 1), j + 1);
        }
    CHECK(rel_l2_error(lhs, rhs) < 1e-10);
}

TEST_CASE("Hardy-type pressure ratio") {
    TorusGrid g(32, 2.0 * M_PI);

    VectorField zero(g);
    CHECK(pressure_hardy_ratio(zero, 1, 0.8) == 0.0);

    VectorField u = localized_divfree(g, 7);
    double r1 = pressure_hardy_ratio(u, 1, 0.8);
    CHECK(r1 > 0.0);
    CHECK(std::isfinite(r1));

    // invariance under scaling (both sides quadratic)
    CHECK(pressure_hardy_ratio(2.0 * u, 1, 0.8) == doctest::Approx(r1).epsilon(1e-10));

    // invariance under translation
    double rt = pressure_hardy_ratio(roll(u, 5, 3, 9), 1, 0.8);
    CHECK(rt == doctest::Approx(r1).epsilon(1e-8));

    CHECK_THROWS_AS(pressure_hardy_ratio(u, 3, 0.8), std::invalid_argument);
}

TEST_CASE("Hardy ratio ensemble stability across resolution") {
    auto worst = [&](int n_grid) {
        TorusGrid g(n_grid, 2.0 * M_PI);
        double m = 0.0;
        for (int e = 0; e < 20; ++e) {
            VectorField u = localized_divfree(g, 500 + e);
            for (int n = 0; n <= 2; ++n)
                m = std::max(m, pressure_hardy_ratio(u, n, 0.8));
        }
        return m;
    };
    double m32 = worst(32), m64 = worst(64);
    CHECK(m32 > 0.0);
    CHECK(m64 / m32 < 2.0);
    CHECK(m32 / m64 < 2.0);
}

TEST_CASE("decay of Riesz-fractional-laplacian of a bump") {
    auto bump = [](const TorusGrid& g) {
        std::array<double, 3> c{g.L / 2, g.L / 2, g.L / 2};
        return sample_radial(g, c,
                             [](double r) { return std::exp(-r * r / (2 * 0.3 * 0.3)); });
    };
    TorusGrid g1(32, 2.0 * M_PI);
    TorusGrid g2(64, 4.0 * M_PI);  // doubled box, same spacing
    std::vector<double> probes{1.0, 1.4};

    ScalarField z(g1);
    CHECK(decay_check(z, 0.8, 0, 0.8, probes) == 0.0);

    double w1 = decay_check(bump(g1), 0.8, 0, 0.8, probes);
    double w2 = decay_check(bump(g2), 0.8, 0, 0.8, probes);
    CHECK(w1 > 0.0);
    CHECK(w2 / w1 < 2.0);
    CHECK(w1 / w2 < 2.0);

    // weight monotone in eta
    CHECK(decay_check(bump(g1), 0.8, 0, 1.2, probes) >
          decay_check(bump(g1), 0.8, 0, 0.4, probes));

    CHECK_THROWS_AS(decay_check(bump(g1), 0.8, 0, 0.8, {2.0}), std::invalid_argument);
    CHECK_THROWS_AS(decay_check(bump(g1), 0.8, 0, 1.7, probes), std::invalid_argument);
}

TEST_CASE("pressure localization decomposition") {
    TorusGrid g(32, 2.0 * M_PI);
    std::array<double, 3> c{g.L / 2, g.L / 2, g.L / 2};
    ScalarField phi =
        sample_radial(g, c, [&](double r) { return radial_cutoff(r, 0.06 * g.L, 0.10 * g.L); });
    ScalarField phibar =
        sample_radial(g, c, [&](double r) { return radial_cutoff(r, 0.12 * g.L, 0.20 * g.L); });

    VectorField u = localized_divfree(g, 11);
    PressurePair pp = solve_pressure(u);
    PressureLocalization loc = localize_pressure(pp.p, u, phi, phibar);

    // sum identity
    VectorField gp = gradient(pp.p);
    for (int comp = 0; comp < 3; ++comp)
        for (std::size_t m = 0; m < g.size(); ++m) {
            double want = phi.v[m] * gp.comp[comp][m];
            double got = loc.riesz_part.comp[comp][m] + loc.remainder.comp[comp][m];
            CHECK(std::abs(got - want) < 1e-8);
        }
    for (double w : loc.remainder_wk_inf) CHECK(std::isfinite(w));
    CHECK(loc.remainder_wk_inf[0] <= loc.remainder_wk_inf[1]);
    CHECK(loc.remainder_wk_inf[1] <= loc.remainder_wk_inf[2]);

    // phibar identically 1: the Riesz part reproduces phi grad p exactly
    ScalarField one(g);
    for (auto& v : one.v) v = 1.0;
    PressureLocalization trivial = localize_pressure(pp.p, u, phi, one);
    CHECK(linf_norm(trivial.remainder) < 1e-10);

    // phi = 0: both parts vanish
    ScalarField zero(g);
    PressureLocalization none = localize_pressure(pp.p, u, zero, phibar);
    CHECK(linf_norm(none.riesz_part) == 0.0);
    CHECK(linf_norm(none.remainder) == 0.0);

    // nesting violation rejected (phibar support smaller than phi's)
    CHECK_THROWS_AS(localize_pressure(pp.p, u, phibar, phi), std::invalid_argument);
}

TEST_CASE("localization remainder bound has a stable constant") {
    auto fitted = [&](int n_grid) {
        TorusGrid g(n_grid, 2.0 * M_PI);
        std::array<double, 3> c{g.L / 2, g.L / 2, g.L / 2};
        ScalarField phi = sample_radial(
            g, c, [&](double r) { return radial_cutoff(r, 0.06 * g.L, 0.10 * g.L); });
        ScalarField phibar = sample_radial(
            g, c, [&](double r) { return radial_cutoff(r, 0.12 * g.L, 0.20 * g.L); });
        Ball b1{c, 0.22 * g.L};
        double worst = 0.0;
        for (int e = 0; e < 5; ++e) {
            VectorField u = localized_divfree(g, 600 + e);
            PressurePair pp = solve_pressure(u);
            PressureLocalization loc = localize_pressure(pp.p, u, phi, phibar);
            double uinf = 0.0;
            for (std::size_t m = 0; m < g.size(); ++m) {
                std::array<int, 3> ijk = g.coords(m);
                std::array<double, 3> x{g.x(ijk[0]), g.x(ijk[1]), g.x(ijk[2])};
                if (g.dist2(x, c) <= b1.radius * b1.radius)
                    uinf = std::max(uinf, u.magnitude(m));
            }
            double den = uinf * uinf + lp_norm(pp.p, 1.0, b1);
            worst = std::max(worst, loc.remainder_wk_inf[0] / den);
        }
        return worst;
    };
    double c32 = fitted(32), c64 = fitted(64);
    CHECK(c32 > 0.0);
    CHECK(c64 / c32 < 2.0);
    CHECK(c32 / c64 < 2.0);
}

TEST_CASE("pressure Poincare ratio") {
    TorusGrid g(32, 2.0 * M_PI);

    // constant field: numerator 0 by the discrete psi normalization
    VectorField cst(g);
    for (auto& v : cst.comp[1]) v = 3.0;
    CHECK(poincare_pressure_ratio(cst, 0.8) == 0.0);

    VectorField u = localized_divfree(g, 23);
    VectorField gp = solve_pressure(u).grad;
    double r1 = poincare_pressure_ratio(gp, 0.8);
    CHECK(r1 > 0.0);
    CHECK(std::isfinite(r1));
    CHECK(poincare_pressure_ratio(2.0 * gp, 0.8) == doctest::Approx(r1).epsilon(1e-10));
}

TEST_CASE("pressure Poincare ensemble stability") {
    auto worst = [&](int n_grid) {
        TorusGrid g(n_grid, 2.0 * M_PI);
        double m = 0.0;
        for (int e = 0; e < 10; ++e) {
            VectorField u = localized_divfree(g, 700 + e);
            m = std::max(m, poincare_pressure_ratio(solve_pressure(u).grad, 0.8));
        }
        return m;
    };
    // n=16 is below the resolution floor of the scaled balls (B_{5/4} holds
    // no grid point), so stability is probed at 32 vs 64
    double m32 = worst(32), m64 = worst(64);
    CHECK(m32 > 0.0);
    CHECK(m64 / m32 < 2.0);
    CHECK(m32 / m64 < 2.0);
}

TEST_CASE("Calderon-Zygmund sanity for the pressure") {
    auto fitted = [&](int n_grid) {
        TorusGrid g(n_grid, 2.0 * M_PI);
        double worst = 0.0;
        for (int e = 0; e < 10; ++e) {
            VectorField u = random_divfree_field(g, 1, g.n / 4.0, 800 + e);
            ScalarField p = solve_pressure(u).p;
            ScalarField umag(g);
            for (std::size_t m = 0; m < g.size(); ++m) umag.v[m] = u.magnitude(m);
            double den = std::pow(lp_norm(umag, 3.0), 2);
            worst = std::max(worst, lp_norm(p, 1.5) / den);
        }
        return worst;
    };
    double c16 = fitted(16), c32 = fitted(32);
    CHECK(c16 > 0.0);
    CHECK(c32 / c16 < 2.0);
    CHECK(c16 / c32 < 2.0);
}

TEST_CASE("W^k,inf norms") {
    TorusGrid g(16, 2.0 * M_PI);
    ScalarField f(g, [](double x, double, double) { return std::cos(2 * x); });
    CHECK(wk_inf_norm(f, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wk_inf_norm(f, 1) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(wk_inf_norm(f, 2) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK_THROWS_AS(wk_inf_norm(f, -1), std::invalid_argument);
}
