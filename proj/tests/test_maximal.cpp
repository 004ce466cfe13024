#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracns/maximal.hpp"

using namespace fracns;

namespace {
const TorusGrid g32(32, 2.0 * M_PI);
const TorusGrid g16(16, 2.0 * M_PI);

TestProfile unit_mass_gaussian() {
    TestProfile p;
    p.name = "unit_gauss";
    p.width = 1.0;
    p.scale = std::pow(2.0 * M_PI, -1.5);
    return p;
}
}  // namespace

TEST_CASE("hardy-littlewood max basics") {
    ScalarField c(g32);
    for (auto& x : c.v) x = -1.7;
    ScalarField mc = hardy_littlewood_max(c);
    CHECK(max_abs_diff(mc, -1.0 * c) < 1e-12);

    ScalarField f = random_band_scalar(g32, 1, 10, 2);
    ScalarField mf = hardy_littlewood_max(f);
    for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(mf.v[i] >= std::abs(f.v[i]) - 1e-13);
}

TEST_CASE("hardy-littlewood spike lower bound at probes") {
    ScalarField spike(g32);
    spike.v[0] = 1.0;
    ScalarField m = hardy_littlewood_max(spike);
    const double h = g32.spacing();

    // direct-average oracle: value at distance d is max over rungs of
    // 1/count(ball) for rungs whose ball reaches the origin
    auto oracle = [&](int pi, int pj, int pk) {
        double best = 0.0;
        for (double r = h; r <= 0.25 * g32.L + 1e-12; r *= 2.0) {
            std::array<double, 3> p{g32.x(pi), g32.x(pj), g32.x(pk)};
            std::array<double, 3> origin{0, 0, 0};
            if (g32.dist2(p, origin) > r * r * (1 + 1e-12)) continue;
            std::size_t count = 0;
            for (int k = 0; k < g32.n; ++k)
                for (int j = 0; j < g32.n; ++j)
                    for (int i = 0; i < g32.n; ++i) {
                        double dx = g32.wrap(i * h), dy = g32.wrap(j * h), dz = g32.wrap(k * h);
                        if (dx * dx + dy * dy + dz * dz <= r * r * (1 + 1e-12)) ++count;
                    }
            best = std::max(best, 1.0 / double(count));
        }
        return best;
    };
    int probes[3][3] = {{2, 0, 0}, {0, 3, 0}, {1, 1, 1}};
    for (auto& p : probes) {
        double got = m(p[0], p[1], p[2]);
        double want = oracle(p[0], p[1], p[2]);
        CHECK(got >= want - 1e-12);
        // ball-volume lower bound from the spec example
        std::array<double, 3> xp{g32.x(p[0]), g32.x(p[1]), g32.x(p[2])};
        double d = std::sqrt(g32.dist2(xp, {0, 0, 0}));
        double cellvol = h * h * h;
        double reach = 2.0 * std::max(d, h);  // a dyadic rung within factor 2 of d
        double ballvol = 4.0 / 3.0 * M_PI * std::pow(reach, 3);
        CHECK(got > 0.1 * cellvol / ballvol);
    }
}

TEST_CASE("sublinearity and scaling") {
    ScalarField f = random_band_scalar(g32, 1, 8, 3);
    ScalarField g = random_band_scalar(g32, 2, 9, 4);
    ScalarField mf = hardy_littlewood_max(f), mg = hardy_littlewood_max(g);
    ScalarField msum = hardy_littlewood_max(f + g);
    for (std::size_t i = 0; i < f.v.size(); ++i)
        CHECK(msum.v[i] <= mf.v[i] + mg.v[i] + 1e-12);

    ScalarField m3 = hardy_littlewood_max(-3.0 * f);
    for (std::size_t i = 0; i < f.v.size(); ++i)
        CHECK(m3.v[i] == doctest::Approx(3.0 * mf.v[i]).epsilon(1e-12));
}

TEST_CASE("L2 boundedness constant stable across resolution") {
    auto fitted = [&](const TorusGrid& g) {
        double worst = 0.0;
        for (int e = 0; e < 20; ++e) {
            ScalarField f = random_band_scalar(g, 1, g.n / 4.0, 50 + e);
            worst = std::max(worst, l2_norm(hardy_littlewood_max(f)) / l2_norm(f));
        }
        return worst;
    };
    double c16 = fitted(g16), c32 = fitted(g32);
    CHECK(std::abs(c32 / c16 - 1.0) < 0.2);
}

TEST_CASE("smooth max") {
    TestProfile psi = unit_mass_gaussian();
    ScalarField c(g32);
    for (auto& x : c.v) x = 2.0;
    ScalarField mc = smooth_max(c, psi);
    for (double x : mc.v) CHECK(x == doctest::Approx(2.0).epsilon(1e-6));

    // pointwise domination by a stable multiple of Mf
    auto cpsi = [&](const TorusGrid& g) {
        double worst = 0.0;
        for (int e = 0; e < 5; ++e) {
            ScalarField f = random_band_scalar(g, 1, g.n / 4.0, 90 + e);
            ScalarField sm = smooth_max(f, psi), hm = hardy_littlewood_max(f);
            for (std::size_t i = 0; i < f.v.size(); ++i)
                worst = std::max(worst, sm.v[i] / hm.v[i]);
        }
        return worst;
    };
    double c16v = cpsi(g16), c32v = cpsi(g32);
    CHECK(c32v / c16v < 2.0);
    CHECK(c16v / c32v < 2.0);

    // nonnegative inputs stay nonnegative
    ScalarField f = random_band_scalar(g16, 1, 4, 8);
    for (auto& x : f.v) x = std::abs(x);
    ScalarField sm = smooth_max(f, psi);
    for (double x : sm.v) CHECK(x >= -1e-12);
}

TEST_CASE("nontangential max") {
    TestProfile psi = unit_mass_gaussian();
    ScalarField f = random_band_scalar(g16, 1, 5, 9);
    ScalarField sm = smooth_max(f, psi), ntm = nontangential_max(f, psi);
    for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(ntm.v[i] >= sm.v[i] - 1e-13);

    ScalarField c(g16);
    for (auto& x : c.v) x = -0.7;
    ScalarField mc = nontangential_max(c, psi);
    for (double x : mc.v) CHECK(x == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("nontangential equals brute-force cone enumeration at n=16") {
    TestProfile psi = unit_mass_gaussian();
    ScalarField spike(g16);
    spike.v[g16.idx(3, 5, 7)] = 1.0;
    ScalarField got = nontangential_max(spike, psi);

    const double h = g16.spacing();
    // enumerate (t, y) pairs; reuse only the convolution primitive
    std::vector<ScalarField> convs;
    std::vector<int> wins;
    for (double t = h; t <= 0.25 * g16.L + 1e-12; t *= 2.0) {
        ScalarField ker(g16);
        double w = h * h * h / (t * t * t);
        for (int k = 0; k < g16.n; ++k)
            for (int j = 0; j < g16.n; ++j)
                for (int i = 0; i < g16.n; ++i)
                    ker.v[g16.idx(i, j, k)] =
                        w * psi.value({g16.wrap(i * h) / t, g16.wrap(j * h) / t,
                                       g16.wrap(k * h) / t});
        convs.push_back(convolve_periodic(spike, ker));
        wins.push_back(int(std::floor(t / h + 1e-9)));
    }
    for (int k = 0; k < g16.n; ++k)
        for (int j = 0; j < g16.n; ++j)
            for (int i = 0; i < g16.n; ++i) {
                double best = 0.0;
                for (std::size_t l = 0; l < convs.size(); ++l) {
                    int wc = wins[l];
                    for (int dk = -wc; dk <= wc; ++dk)
                        for (int dj = -wc; dj <= wc; ++dj)
                            for (int di = -wc; di <= wc; ++di) {
                                int ii = ((i + di) % 16 + 16) % 16;
                                int jj = ((j + dj) % 16 + 16) % 16;
                                int kk = ((k + dk) % 16 + 16) % 16;
                                best = std::max(best, std::abs(convs[l](ii, jj, kk)));
                            }
                }
                CHECK(got(i, j, k) == doctest::Approx(best).epsilon(1e-12));
            }
}

TEST_CASE("grand max approx") {
    TestFunctionFamily fam = make_admissible_family();
    CHECK(fam.members.size() == 6);
    for (const auto& m : fam.members)
        CHECK(m.schwartz_budget() == doctest::Approx(1.0).epsilon(1e-6));

    ScalarField f = random_band_scalar(g16, 1, 5, 12);
    // single-member family equals that member's nontangential max
    TestFunctionFamily single{{fam.members[0]}};
    ScalarField g1 = grand_max_approx(f, single);
    ScalarField n1 = nontangential_max(f, fam.members[0]);
    CHECK(max_abs_diff(g1, n1) == 0.0);

    // monotone under family inclusion
    ScalarField gall = grand_max_approx(f, fam);
    for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(gall.v[i] >= g1.v[i]);

    // dominates smooth max of any member
    ScalarField sm = smooth_max(f, fam.members[2]);
    for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(gall.v[i] >= sm.v[i] - 1e-13);

    CHECK_THROWS_AS(grand_max_approx(f, TestFunctionFamily{}), std::invalid_argument);
}

TEST_CASE("grand max vs Hardy-norm proxy over an ensemble") {
    TestFunctionFamily fam = make_admissible_family();
    auto worst = [&](const TorusGrid& g) {
        double m = 0.0;
        for (int e = 0; e < 5; ++e) {
            ScalarField f = random_band_scalar(g, 1, 4, 70 + e);
            double num = lp_norm(grand_max_approx(f, fam), 1.0);
            double den = hardy_norm_proxy(f);
            m = std::max(m, num / den);
        }
        return m;
    };
    double r16 = worst(g16), r32 = worst(g32);
    CHECK(r16 > 0.0);
    CHECK(r16 < 10.0);
    CHECK(r32 / r16 < 2.0);
    CHECK(r16 / r32 < 2.0);
}

TEST_CASE("band-limited max bound") {
    // plane wave within the band
    ScalarField w(g32, [](double x, double, double) { return std::cos(2.0 * x); });
    std::vector<std::array<int, 3>> probes{{0, 0, 0}, {3, 0, 0}, {0, 5, 2}};
    double r = 3.0;
    double ratio = band_limited_max_bound_check(w, r, probes);
    CHECK(std::isfinite(ratio));

    // z = 0 probe alone: |f|/Mf <= 1 since Mf >= |f|
    double r0 = band_limited_max_bound_check(w, r, {{0, 0, 0}});
    CHECK(r0 <= 1.0 + 1e-12);

    // resolution stability on a small ensemble
    auto worst = [&](const TorusGrid& g) {
        double m = 0.0;
        for (int e = 0; e < 5; ++e) {
            ScalarField f = random_band_scalar(g, 1, 4, 30 + e);
            m = std::max(m, band_limited_max_bound_check(f, 4.5, probes));
        }
        return m;
    };
    double m16 = worst(g16), m32 = worst(g32);
    CHECK(m32 / m16 < 2.0);
    CHECK(m16 / m32 < 2.0);

    // non-band-limited input rejected
    ScalarField noise = random_band_scalar(g16, 1, 7, 5);
    CHECK_THROWS_AS(band_limited_max_bound_check(noise, 2.0, probes), std::invalid_argument);
}
