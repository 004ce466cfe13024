#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "fracns/diagnostics.hpp"
#include "fracns/spectral.hpp"

using namespace fracns;

namespace {

// C^2 plateau profile: 1 on [0, y1], quintic smoothstep down to 0 at y2
struct Plateau {
    double y1, y2;
    double operator()(double y) const {
        if (y <= y1) return 1.0;
        if (y >= y2) return 0.0;
        double t = (y - y1) / (y2 - y1);
        return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    }
    double d1(double y) const {
        if (y <= y1 || y >= y2) return 0.0;
        double t = (y - y1) / (y2 - y1);
        return -30.0 * t * t * (1.0 - t) * (1.0 - t) / (y2 - y1);
    }
    double d2(double y) const {
        if (y <= y1 || y >= y2) return 0.0;
        double t = (y - y1) / (y2 - y1);
        return -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / ((y2 - y1) * (y2 - y1));
    }
};

Trajectory steady_trajectory(const TorusGrid& g, const VectorField& u, double s,
                             double t_end, int frames) {
    Trajectory traj;
    traj.grid = g;
    traj.config.s = s;
    for (int i = 0; i < frames; ++i) {
        traj.times.push_back(t_end * i / (frames - 1));
        traj.frames.push_back(u);
        traj.energy.push_back(0.0);
        traj.dissipation.push_back(0.0);
    }
    return traj;
}

}  // namespace

TEST_CASE("derivative exponents and box-counting bounds at the endpoints") {
    CHECK(derivative_exponent(0.75, 1) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    CHECK(derivative_exponent(0.75, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(derivative_exponent(1.0, 1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(derivative_exponent(1.0, 2) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(derivative_exponent(0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(derivative_exponent(0.8, 3), std::invalid_argument);

    auto [b_suit, b_leray] = dimension_bounds(0.75);
    CHECK(b_suit == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(b_leray == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
    auto [c_suit, c_leray] = dimension_bounds(1.0);
    CHECK(c_suit == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    CHECK(c_leray == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(dimension_bounds(0.6), std::invalid_argument);
}

TEST_CASE("weak Lp norm of the critical power profile") {
    TorusGrid g(48, 2.0 * M_PI);
    std::array<double, 3> c{M_PI, M_PI, M_PI};
    double h = g.spacing();
    for (double p : {4.0 / 3.0, 2.0}) {
        ScalarField f(g);
        for (std::size_t id = 0; id < g.size(); ++id) {
            auto ix = g.coords(id);
            std::array<double, 3> x{g.x(ix[0]), g.x(ix[1]), g.x(ix[2])};
            // truncate the singularity at a resolved radius: the lattice can
            // only count super-level sets a few cells across
            double r = std::max(std::sqrt(g.dist2(x, c)), 4.0 * h);
            f.v[id] = std::pow(r, -3.0 / p);
        }
        WeakLpResult w = weak_lp_norm(f, p, Ball{c, 0.25 * g.L});
        double exact = std::pow(4.0 * M_PI / 3.0, 1.0 / p);
        INFO("p=", p, " c=", w.c, " exact=", exact);
        CHECK(std::abs(w.c - exact) < 0.08 * exact);
        CHECK(w.attained_level > 0.0);
        CHECK(w.ladder.size() == 7);
    }
    CHECK_THROWS_AS(weak_lp_norm(ScalarField(g), 0.5, Ball{c, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("weak Lp norm of an indicator keeps the plateau") {
    TorusGrid g(32, 2.0 * M_PI);
    std::array<double, 3> c{M_PI, M_PI, M_PI};
    ScalarField f(g);
    double r0 = 1.0;
    for (std::size_t id = 0; id < g.size(); ++id) {
        auto ix = g.coords(id);
        std::array<double, 3> x{g.x(ix[0]), g.x(ix[1]), g.x(ix[2])};
        f.v[id] = g.dist2(x, c) <= r0 * r0 ? 1.0 : 0.0;
    }
    double vol = ball_volume_on_grid(g, Ball{c, r0});
    WeakLpResult w = weak_lp_norm(f, 2.0, Ball{c, -1.0});
    CHECK(w.c == doctest::Approx(std::sqrt(vol)).epsilon(1e-12));

    // constant-in-time stacking reproduces the spatial value
    std::vector<ScalarField> slices{f, f, f};
    std::vector<double> times{0.0, 0.4, 1.0};
    WeakLpResult ws = weak_lp_norm_spacetime(slices, times, 2.0, Ball{c, -1.0});
    CHECK(ws.c == doctest::Approx(std::sqrt(vol)).epsilon(1e-12));
}

TEST_CASE("scale-optimal density F: structure and domination") {
    TorusGrid g(24, 2.0 * M_PI);
    double s = 0.8;
    VectorField u = random_divfree_field(g, 1.0, 5.0, 42);
    PressurePair pr = solve_pressure(u);
    ScaleOptimalF F = scale_optimal_F(u, pr, s);

    double delta = 2.0 * s / (6.0 - s);
    VectorField lsu = fractional_laplacian(u, s);
    for (std::size_t id = 0; id < g.size(); ++id) {
        CHECK(F.maximal_part.v[id] >= 0.0);
        CHECK(F.pressure_part.v[id] >= 0.0);
        CHECK(F.grand_part.v[id] >= 0.0);
        CHECK(F.total.v[id] == doctest::Approx(F.maximal_part.v[id] + F.pressure_part.v[id] +
                                               F.grand_part.v[id])
                                   .epsilon(1e-12));
    }
    // the maximal part dominates |Lambda^s u|^2 pointwise (M f >= f)
    for (std::size_t id = 0; id < g.size(); id += 7) {
        double m = lsu.magnitude(id);
        CHECK(F.maximal_part.v[id] >= std::pow(m, 2.0) * (1.0 - 1e-10));
    }
    (void)delta;
}

TEST_CASE("scale-optimal G cells reproduce the extension energy identity") {
    TorusGrid g(16, 2.0 * M_PI);
    double s = 0.8;
    VectorField u = random_divfree_field(g, 1.0, 4.0, 7);
    ExtensionProfile profile = build_profile(s);
    std::vector<double> y_levels = make_y_levels(g, 64);
    std::vector<ScalarField> cells = scale_optimal_G(u, profile, y_levels, -1.0);
    double h3 = std::pow(g.spacing(), 3);
    double total = 0.0;
    for (const ScalarField& cell : cells)
        for (double v : cell.v) total += v;
    total *= h3;
    double target = 0.0;
    for (int c = 0; c < 3; ++c) {
        double nrm = lp_norm(fractional_laplacian(u.component(c), s), 2.0,
                             Ball{{0, 0, 0}, -1.0});
        target += nrm * nrm;
    }
    INFO("cells=", total, " exact=", target);
    CHECK(std::abs(total - target) < 0.05 * target);
}

TEST_CASE("local energy identity for an exact shear solution") {
    TorusGrid g(16, 2.0 * M_PI);
    double s = 0.8;
    // u = (A sin(2 x2), 0, 0): the convective term vanishes identically, the
    // pressure is zero, and exponential integrators reproduce the exact decay
    VectorField u0(g);
    for (std::size_t id = 0; id < g.size(); ++id) {
        auto c = g.coords(id);
        u0.comp[0][id] = 0.7 * std::sin(2.0 * g.x(c[1]));
    }
    SolverConfig cfg;
    cfg.s = s;
    cfg.dt = 2.5e-3;
    cfg.t_end = 0.05;
    cfg.adapt_cfl = false;
    Trajectory traj = run(cfg, g, u0);
    REQUIRE(traj.frames.size() >= 5);

    LeiTestFunction xi;
    xi.space = ScalarField(g);
    for (std::size_t id = 0; id < g.size(); ++id) {
        auto c = g.coords(id);
        xi.space.v[id] = 1.0 + 0.5 * std::cos(g.x(c[0])) * std::sin(g.x(c[1]));
    }
    Plateau eta{0.5, 2.5};
    xi.height = [eta](double y) { return eta(y); };
    xi.height_d1 = [eta](double y) { return eta.d1(y); };
    xi.height_d2 = [eta](double y) { return eta.d2(y); };
    xi.time_w = [](double) { return 1.0; };
    xi.time_d1 = [](double) { return 0.0; };

    ExtensionProfile profile = build_profile(s);
    double e0 = traj.energy.front();
    double res_c = local_energy_residual(traj, xi, profile, make_y_levels(g, 32), 0,
                                         traj.frames.size() - 1);
    double res_f = local_energy_residual(traj, xi, profile, make_y_levels(g, 64), 0,
                                         traj.frames.size() - 1);
    std::printf("  energy residual: 32 levels %.3e, 64 levels %.3e (E0=%.3e)\n", res_c,
                res_f, e0);
    // equality up to quadrature error, improving under y refinement
    CHECK(std::abs(res_c) < 2e-2 * e0);
    CHECK(std::abs(res_f) < std::abs(res_c));

    // validation
    CHECK_THROWS_AS(local_energy_residual(traj, xi, profile, make_y_levels(g, 32), 3, 2),
                    std::invalid_argument);
    LeiTestFunction bad = xi;
    bad.space.v[0] = -1.0;
    CHECK_THROWS_AS(
        local_energy_residual(traj, bad, profile, make_y_levels(g, 32), 0, 2),
        std::invalid_argument);
}

TEST_CASE("regularity scan: self-calibration and validation") {
    TorusGrid g(16, 2.0 * M_PI);
    SolverConfig cfg;
    cfg.s = 0.8;
    cfg.dt = 2e-2;
    cfg.t_end = 0.8;
    cfg.output_every = 10;
    VectorField u0 = random_divfree_field(g, 1.0, 3.0, 5);
    for (int c = 0; c < 3; ++c)
        for (double& v : u0.comp[std::size_t(c)]) v *= 0.5;
    Trajectory traj = run(cfg, g, u0);

    std::vector<double> radii{g.L / 8.0, g.L / 10.0};
    ScanReport rep = eps_regularity_scan(traj, cfg.s, -1.0, radii);
    CHECK(rep.eps > 0.0);
    CHECK(rep.cylinders.size() > 0);
    for (int b : rep.bad_count) CHECK(b == 0);  // self-calibrated: all small
    for (const CylinderReport& cr : rep.cylinders) {
        CHECK(cr.extension_energy >= 0.0);
        CHECK(cr.slobodeckij >= 0.0);
        CHECK(cr.f_integral >= 0.0);
        CHECK(cr.cubic >= 0.0);
        CHECK(cr.rescaled_sum >= 0.0);
        CHECK(cr.small);
    }
    CHECK(rep.dimension_bound ==
          doctest::Approx((15.0 - 2.0 * 0.8 - 8.0 * 0.64) / 3.0).epsilon(1e-14));

    // a tiny eps marks everything bad
    ScanReport tight = eps_regularity_scan(traj, cfg.s, rep.eps * 1e-9, radii);
    int bad_total = 0;
    for (int b : tight.bad_count) bad_total += b;
    CHECK(bad_total == int(tight.cylinders.size()));

    CHECK_THROWS_AS(eps_regularity_scan(traj, cfg.s, -1.0, {g.L / 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(eps_regularity_scan(traj, cfg.s, -1.0, {2.0}),  // r^{2s} > span
                    std::invalid_argument);
}

TEST_CASE("mollified velocity: mean preservation and smoothing") {
    TorusGrid g(32, 2.0 * M_PI);
    VectorField u = random_divfree_field(g, 2.0, 8.0, 13);
    double lambda = 4.0 * g.spacing();
    VectorField m = mollified_velocity(u, lambda);
    for (int c = 0; c < 3; ++c) {
        double s0 = 0.0, s1 = 0.0, e0 = 0.0, e1 = 0.0;
        for (std::size_t id = 0; id < g.size(); ++id) {
            s0 += u.comp[std::size_t(c)][id];
            s1 += m.comp[std::size_t(c)][id];
            e0 += u.comp[std::size_t(c)][id] * u.comp[std::size_t(c)][id];
            e1 += m.comp[std::size_t(c)][id] * m.comp[std::size_t(c)][id];
        }
        CHECK(std::abs(s1 - s0) < 1e-8 * (std::abs(s0) + g.size()));
        CHECK(e1 <= e0 * (1.0 + 1e-12));  // averaging cannot create energy
    }
    CHECK_THROWS_AS(mollified_velocity(u, 0.1 * g.spacing()), std::invalid_argument);
}

TEST_CASE("flow map: uniform transport is exact") {
    TorusGrid g(16, 2.0 * M_PI);
    VectorField u(g);
    for (std::size_t id = 0; id < g.size(); ++id) {
        u.comp[0][id] = 0.3;
        u.comp[1][id] = -0.2;
        u.comp[2][id] = 0.1;
    }
    Trajectory traj = steady_trajectory(g, u, 0.8, 0.5, 3);
    std::vector<std::array<double, 3>> seeds{{1.0, 2.0, 3.0}, {0.1, 0.2, 5.9}};
    FlowPaths paths = flow_map(traj, 2.0 * g.spacing(), seeds, 0.5, 0.0, 8);
    REQUIRE(paths.pos.size() == 2);
    REQUIRE(paths.pos[0].size() == 9);
    for (std::size_t sdx = 0; sdx < seeds.size(); ++sdx) {
        const auto& fin = paths.pos[sdx].back();
        for (int a = 0; a < 3; ++a) {
            double want = seeds[sdx][std::size_t(a)] - 0.5 * u.comp[std::size_t(a)][0];
            CHECK(std::abs(g.wrap(fin[std::size_t(a)] - want)) < 1e-10);
        }
    }
    CHECK_THROWS_AS(flow_map(traj, 2.0 * g.spacing(), seeds, 0.2, 0.5, 8),
                    std::invalid_argument);
}

TEST_CASE("flow map preserves volume along a divergence-free field") {
    TorusGrid g(32, 2.0 * M_PI);
    VectorField u(g);  // Taylor-Green cell
    for (std::size_t id = 0; id < g.size(); ++id) {
        auto c = g.coords(id);
        double x = g.x(c[0]), y = g.x(c[1]), z = g.x(c[2]);
        u.comp[0][id] = std::sin(x) * std::cos(y) * std::cos(z);
        u.comp[1][id] = -std::cos(x) * std::sin(y) * std::cos(z);
    }
    Trajectory traj = steady_trajectory(g, u, 0.8, 0.4, 3);
    std::vector<std::array<double, 3>> centers{{2.0, 2.5, 3.0}, {4.4, 1.3, 0.7}};
    double defect = flow_volume_defect(traj, 2.0 * g.spacing(), centers, 0.1, 0.4, 0.0, 24);
    std::printf("  volume defect: %.3e\n", defect);
    CHECK(defect < 1e-3);
    CHECK_THROWS_AS(flow_volume_defect(traj, 2.0 * g.spacing(), {}, 0.1, 0.4, 0.0, 8),
                    std::invalid_argument);
}

TEST_CASE("level-set table and a-priori weak bound on a short run") {
    TorusGrid g(16, 2.0 * M_PI);
    SolverConfig cfg;
    cfg.s = 0.8;
    cfg.dt = 2e-2;
    cfg.t_end = 2.0;
    cfg.output_every = 10;
    VectorField u0 = random_divfree_field(g, 1.0, 3.0, 19);
    Trajectory traj = run(cfg, g, u0);

    std::vector<double> lambdas{0.28, 0.22};
    for (int n : {1, 2}) {
        std::vector<LevelsetRow> rows = levelset_bound_check(traj, cfg.s, lambdas, n);
        REQUIRE(rows.size() == lambdas.size());
        for (const LevelsetRow& row : rows) {
            CHECK(row.threshold > 0.0);
            CHECK(row.slab_dissipation > 0.0);
            CHECK(row.ratio >= 0.0);
            CHECK(std::isfinite(row.ratio));
            CHECK(row.h_max >= 0.0);
            CHECK(row.h_scale == doctest::Approx(std::pow(row.lambda, 5.0 - 4.0 * cfg.s))
                                     .epsilon(1e-12));
            std::printf("  n=%d lambda=%.2f measure=%.3e ratio=%.3e h=%.3e/%.3e\n", n,
                        row.lambda, row.level_measure, row.ratio, row.h_max, row.h_scale);
        }
    }
    CHECK_THROWS_AS(levelset_bound_check(traj, cfg.s, lambdas, 3), std::invalid_argument);
    CHECK_THROWS_AS(levelset_bound_check(traj, cfg.s, {3.0}, 1), std::invalid_argument);

    double ratio = apriori_weak_lp_check(traj, 1, 0.2, Ball{{M_PI, M_PI, M_PI}, 2.0});
    CHECK(ratio > 0.0);
    CHECK(std::isfinite(ratio));
    std::printf("  a-priori weak-Lp ratio: %.3e\n", ratio);
}

TEST_CASE("cylinder validation") {
    TorusGrid g(16, 2.0 * M_PI);
    CylinderSpec ok{{1.0, 1.0, 1.0}, 1.0, g.L / 10.0};
    CHECK_NOTHROW(validate_cylinder(ok, g, 0.8, 0.0, 2.0));
    CylinderSpec big = ok;
    big.r = g.L / 4.0;
    CHECK_THROWS_AS(validate_cylinder(big, g, 0.8, 0.0, 2.0), std::invalid_argument);
    CylinderSpec early = ok;
    early.t = 0.05;  // t - r^{2s} < 0
    CHECK_THROWS_AS(validate_cylinder(early, g, 0.8, 0.0, 2.0), std::invalid_argument);
}
