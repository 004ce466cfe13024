#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "fracns/extension.hpp"
#include "fracns/fns_io.hpp"

using namespace fracns;

namespace {

const ExtensionProfile& profile08() {
    static ExtensionProfile p = build_profile(0.8);
    return p;
}
const ExtensionProfile& profile09() {
    static ExtensionProfile p = build_profile(0.9);
    return p;
}

// closed-form solution of theta'' + (a/t) theta' = theta with theta(0) = 1 and
// decay at infinity: (2^{1-s}/Gamma(s)) t^s K_s(t); independent oracle for the
// quadrature-tabulated profile
double ode_oracle(double s, double t) {
    return std::pow(2.0, 1.0 - s) / std::tgamma(s) * std::pow(t, s) * std::cyl_bessel_k(s, t);
}

}  // namespace

TEST_CASE("profile basics and monotonicity") {
    const ExtensionProfile& p = profile08();
    CHECK(p(0.0) == 1.0);
    CHECK(p(-3.0) == 1.0);
    for (std::size_t i = 1; i < p.phi.size(); ++i) CHECK(p.phi[i] <= p.phi[i - 1]);
    for (double t : {1e-5, 0.01, 0.3, 1.0, 4.0}) {
        CHECK(p(t) > 0.0);
        CHECK(p(t) < 1.0);
    }
    // exponential tail fit
    for (double t = 5.0; t <= 15.0; t += 1.0) CHECK(p(t) <= std::exp(-0.4 * t));
    CHECK(p(100.0) == 0.0);

    CHECK_THROWS_AS(build_profile(0.5), std::invalid_argument);
    CHECK_THROWS_AS(build_profile(1.2), std::invalid_argument);
}

TEST_CASE("profile matches the mode ODE solution") {
    // 10 deterministic pseudo-random points in [0.01, 5]
    std::uint64_t state = 12345;
    auto next01 = [&]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return double(state >> 11) / 9007199254740992.0;
    };
    for (const ExtensionProfile* p : {&profile08(), &profile09()}) {
        for (int q = 0; q < 10; ++q) {
            double t = 0.01 * std::pow(500.0, next01());
            CHECK(std::abs((*p)(t)-ode_oracle(p->s, t)) < 1e-6);
        }
    }
}

TEST_CASE("near-degenerate s limit against the ODE solution") {
    ExtensionProfile p = build_profile(0.999);
    for (double t : {0.05, 0.2, 0.7, 1.5, 3.0, 6.0})
        CHECK(std::abs(p(t) - ode_oracle(0.999, t)) < 1e-4);
}

TEST_CASE("y-mesh invariants") {
    TorusGrid g(32, 2.0 * M_PI);
    for (int count : {8, 32, 64, 128}) {
        std::vector<double> y = make_y_levels(g, count);
        REQUIRE(int(y.size()) == count);
        CHECK(y[0] <= g.spacing() / 4.0);
        CHECK(y[0] > 0.0);
        for (int i = 1; i < count; ++i) CHECK(y[i] > y[i - 1]);
        CHECK(y.back() == g.L);
    }
    CHECK_THROWS_AS(make_y_levels(g, 4), std::invalid_argument);
}

TEST_CASE("extend basics") {
    TorusGrid g(16, 2.0 * M_PI);
    const ExtensionProfile& p = profile08();
    std::vector<double> y = make_y_levels(g, 16);

    // constant stays constant at every level
    ScalarField c(g);
    for (auto& x : c.v) x = 2.5;
    ExtendedField ec = extend(c, p, y);
    for (const auto& lv : ec.level)
        for (double v : lv) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));

    // plane wave scales by phi(y) per level
    ScalarField w(g, [](double x, double, double) { return std::cos(x); });
    ExtendedField ew = extend(w, p, y);
    for (std::size_t l = 0; l < y.size(); ++l) {
        double want = p(y[l]);
        for (std::size_t i = 0; i < w.v.size(); ++i)
            CHECK(ew.level[l][i] == doctest::Approx(want * w.v[i]).epsilon(1e-10).scale(1.0));
    }

    // linearity
    ScalarField f = random_band_scalar(g, 1, 4, 5);
    ExtendedField ef = extend(f, p, y);
    ExtendedField esum = extend(f + w, p, y);
    for (std::size_t l = 0; l < y.size(); ++l)
        for (std::size_t i = 0; i < f.v.size(); ++i)
            CHECK(std::abs(esum.level[l][i] - ef.level[l][i] - ew.level[l][i]) < 1e-12);

    // exact boundary trace
    CHECK(max_abs_diff(ef.boundary, f) == 0.0);

    CHECK_THROWS_AS(extend(f, p, {}), std::invalid_argument);
    CHECK_THROWS_AS(extend(f, p, {0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("mode-wise maximum principle") {
    TorusGrid g(16, 2.0 * M_PI);
    ScalarField f = random_band_scalar(g, 1, 5, 21);
    ExtendedField ext = extend(f, profile08(), make_y_levels(g, 16));
    SpectralField base = fourier_forward(f);
    for (const auto& lv : ext.level) {
        ScalarField level(g);
        level.v = lv;
        SpectralField spec = fourier_forward(level);
        for (std::size_t i = 0; i < spec.c.size(); ++i)
            CHECK(std::abs(spec.c[i]) <= std::abs(base.c[i]) + 1e-12);
    }
}

TEST_CASE("weighted energy identity against the spectral norm") {
    TorusGrid g(32, 2.0 * M_PI);
    for (double s : {0.8, 0.9}) {
        const ExtensionProfile& p = (s == 0.8) ? profile08() : profile09();
        // the trace-normalized plane-wave energy has the closed form
        // 2^{1-2s} Gamma(1-s)/Gamma(s); the calibrated constant must match it
        double want_norm =
            std::pow(2.0, 1.0 - 2.0 * s) * std::tgamma(1.0 - s) / std::tgamma(s);
        CHECK(p.energy_norm == doctest::Approx(want_norm).epsilon(1e-3));
        ScalarField f = random_band_scalar(g, 1, 6, 17);
        double target = std::pow(l2_norm(fractional_laplacian(f, s)), 2);
        REQUIRE(target > 0.0);

        double prev_err = -1.0;
        std::vector<double> errs;
        for (int count : {64, 128}) {
            ExtendedField ext = extend(f, p, make_y_levels(g, count));
            double e = weighted_energy(ext);
            errs.push_back(std::abs(e - target) / target);
        }
        CHECK(errs[0] <= 0.02);
        CHECK(errs[1] < errs[0]);          // monotone improvement
        CHECK(errs[0] / errs[1] >= 2.0);   // observed order >= 1
        (void)prev_err;
    }
}

TEST_CASE("weighted energy trivial properties") {
    TorusGrid g(16, 2.0 * M_PI);
    const ExtensionProfile& p = profile08();
    std::vector<double> y = make_y_levels(g, 16);

    ScalarField c(g);
    for (auto& x : c.v) x = -4.0;
    CHECK(weighted_energy(extend(c, p, y)) < 1e-15);

    ScalarField f = random_band_scalar(g, 1, 4, 9);
    double e1 = weighted_energy(extend(f, p, y));
    double e2 = weighted_energy(extend(2.0 * f, p, y));
    CHECK(e2 == doctest::Approx(4.0 * e1).epsilon(1e-12));

    // region-restricted energy is monotone in the region and bounded by full
    Ball small{{M_PI, M_PI, M_PI}, 1.0};
    Ball big{{M_PI, M_PI, M_PI}, 2.0};
    ExtendedField ext = extend(f, p, y);
    double es = weighted_energy(ext, small, 1.0);
    double eb = weighted_energy(ext, big, 2.0);
    double ef = weighted_energy(ext);
    CHECK(es > 0.0);
    CHECK(es <= eb + 1e-15);
    CHECK(eb <= ef + 1e-15);

    // per-cell integrals sum to the full energy
    auto cells = weighted_gradient_cell_integrals(ext, -1.0);
    double acc = 0.0;
    double h3 = std::pow(g.spacing(), 3);
    for (const auto& cell : cells)
        for (double v : cell.v) acc += v * h3;
    CHECK(acc == doctest::Approx(ef).epsilon(1e-10));
}

TEST_CASE("recovery of the fractional laplacian") {
    const ExtensionProfile& p = profile08();
    double cbar = calibrate_cbar(p);
    CHECK(cbar > 0.0);

    TorusGrid g(32, 2.0 * M_PI);
    std::vector<double> y = make_y_levels(g, 64);

    // constant -> 0
    ScalarField c(g);
    for (auto& x : c.v) x = 3.0;
    ScalarField rc = recover_frac_laplacian(extend(c, p, y), cbar);
    // zero up to FFT roundoff amplified by the y^a / dy slope weights (~4e5)
    CHECK(linf_norm(rc) < 1e-6);

    // plane wave at |k| = 1: Lambda^{2s} cos(x1) = cos(x1)
    ScalarField w(g, [](double x, double, double) { return std::cos(x); });
    ScalarField rw = recover_frac_laplacian(extend(w, p, y), cbar);
    CHECK(rel_l2_error(rw, w) < 1e-3);

    // random band-limited ensemble vs the spectral operator
    for (int e = 0; e < 10; ++e) {
        ScalarField f = random_band_scalar(g, 1, 6, 100 + e);
        ScalarField got = recover_frac_laplacian(extend(f, p, y), cbar);
        ScalarField want = fractional_laplacian(f, 2.0 * p.s);
        CHECK(rel_l2_error(got, want) <= 0.01);
    }

    // too few levels flagged
    ExtendedField shallow = extend(w, p, {y[0], y[1], y[2]});
    CHECK_THROWS_AS(recover_frac_laplacian(shallow, cbar), std::invalid_argument);
}

TEST_CASE("extension Poincare check") {
    const ExtensionProfile& p = profile08();
    TorusGrid g16(16, 2.0 * M_PI);
    TorusGrid g32(32, 2.0 * M_PI);
    Ball inner{{M_PI, M_PI, M_PI}, 1.0};

    // 0/0 -> 0
    ScalarField z(g16);
    CHECK(poincare_extension_check(z, p, inner, make_y_levels(g16, 16)) == 0.0);

    auto ensemble_max = [&](const TorusGrid& g, int nfields) {
        std::vector<double> y = make_y_levels(g, 32);
        double worst = 0.0;
        for (int e = 0; e < nfields; ++e) {
            ScalarField f = mean_localize(random_band_scalar(g, 1, 4, 400 + e), inner);
            worst = std::max(worst, poincare_extension_check(f, p, inner, y));
        }
        return worst;
    };
    double m16 = ensemble_max(g16, 20);
    double m32 = ensemble_max(g32, 20);
    CHECK(m16 > 0.0);
    CHECK(std::isfinite(m16));
    CHECK(m32 / m16 < 2.0);
    CHECK(m16 / m32 < 2.0);

    // scaling invariance
    ScalarField f = mean_localize(random_band_scalar(g16, 1, 4, 401), inner);
    std::vector<double> y = make_y_levels(g16, 32);
    double r1 = poincare_extension_check(f, p, inner, y);
    double r2 = poincare_extension_check(2.0 * f, p, inner, y);
    CHECK(r2 == doctest::Approx(r1).epsilon(1e-10));
}

TEST_CASE("weighted Poincare ratio on the cylinder") {
    const ExtensionProfile& p = profile08();
    Ball region{{M_PI, M_PI, M_PI}, 1.5};
    auto ensemble_max = [&](const TorusGrid& g) {
        std::vector<double> y = make_y_levels(g, 32);
        double worst = 0.0;
        for (int e = 0; e < 8; ++e) {
            ScalarField f = random_band_scalar(g, 1, 4, 300 + e);
            double r = weighted_poincare_ratio(extend(f, p, y), region);
            CHECK(r >= 0.0);
            CHECK(std::isfinite(r));
            worst = std::max(worst, r);
        }
        return worst;
    };
    double m16 = ensemble_max(TorusGrid(16, 2.0 * M_PI));
    double m32 = ensemble_max(TorusGrid(32, 2.0 * M_PI));
    CHECK(m16 > 0.0);
    CHECK(m32 / m16 < 2.0);
    CHECK(m16 / m32 < 2.0);
}

TEST_CASE("extended field serialization round trip") {
    TorusGrid g(16, 2.0 * M_PI);
    ScalarField f = random_band_scalar(g, 1, 4, 55);
    ExtendedField ext = extend(f, profile08(), make_y_levels(g, 12));
    std::string path = "/tmp/fracns_test_ext.fns1";
    write_extended(path, ext);
    ExtendedField back = read_extended(path);
    CHECK(back.grid == ext.grid);
    CHECK(back.s == ext.s);
    CHECK(back.energy_norm == ext.energy_norm);
    REQUIRE(back.y.size() == ext.y.size());
    for (std::size_t i = 0; i < ext.y.size(); ++i) CHECK(back.y[i] == ext.y[i]);
    CHECK(max_abs_diff(back.boundary, ext.boundary) == 0.0);
    for (std::size_t l = 0; l < ext.level.size(); ++l)
        for (std::size_t i = 0; i < ext.level[l].size(); ++i)
            CHECK(back.level[l][i] == ext.level[l][i]);
    std::remove(path.c_str());
}
