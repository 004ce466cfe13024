#include "fracns/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fracns/commutator.hpp"
#include "fracns/diagnostics.hpp"
#include "fracns/fns_io.hpp"
#include "fracns/pressure.hpp"
#include "fracns/report.hpp"

namespace fracns {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        throw std::invalid_argument("config error at " + path + ": expected an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) ok = true;
        if (!ok)
            throw std::invalid_argument("config error at " + path + "." + item.key() +
                                        ": unknown key");
    }
}

double get_num(const json& j, const std::string& path, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw std::invalid_argument("config error at " + path + "." + key +
                                    ": expected a number");
    return j[key].get<double>();
}

std::string get_str(const json& j, const std::string& path, const char* key,
                    const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string())
        throw std::invalid_argument("config error at " + path + "." + key +
                                    ": expected a string");
    return j[key].get<std::string>();
}

std::vector<double> get_vec(const json& j, const std::string& path, const char* key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array())
        throw std::invalid_argument("config error at " + path + "." + key +
                                    ": expected an array of numbers");
    for (const auto& v : j[key]) {
        if (!v.is_number())
            throw std::invalid_argument("config error at " + path + "." + key +
                                        ": expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
    check_keys(doc, "$",
               {"mode", "s", "grid", "solver", "initial", "diagnostics", "output"});
    RunConfig cfg;
    cfg.raw = doc;
    cfg.mode = get_str(doc, "$", "mode", cfg.mode);
    for (const char* m : {"simulate", "diagnose", "scan"})
        if (cfg.mode == m) goto mode_ok;
    throw std::invalid_argument("config error at $.mode: expected simulate|diagnose|scan");
mode_ok:
    cfg.s = get_num(doc, "$", "s", cfg.s);
    if (!(cfg.s > 0.75 && cfg.s < 1.0))
        throw std::invalid_argument("config error at $.s: must lie in (3/4, 1)");
    if (doc.contains("grid")) {
        check_keys(doc["grid"], "$.grid", {"n", "L"});
        cfg.n = int(get_num(doc["grid"], "$.grid", "n", cfg.n));
        cfg.L = get_num(doc["grid"], "$.grid", "L", cfg.L);
        if (cfg.n < 4 || cfg.n % 2 != 0)
            throw std::invalid_argument("config error at $.grid.n: need an even n >= 4");
        if (!(cfg.L > 0.0))
            throw std::invalid_argument("config error at $.grid.L: must be positive");
    }
    cfg.solver.s = cfg.s;
    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        check_keys(s, "$.solver", {"dt", "t_end", "integrator", "seed", "output_every"});
        cfg.solver.dt = get_num(s, "$.solver", "dt", cfg.solver.dt);
        cfg.solver.t_end = get_num(s, "$.solver", "t_end", cfg.solver.t_end);
        cfg.solver.seed = std::uint64_t(get_num(s, "$.solver", "seed", 0.0));
        cfg.solver.output_every = int(get_num(s, "$.solver", "output_every", 1.0));
        std::string integ = get_str(s, "$.solver", "integrator", "etd_rk2");
        if (integ == "etd_rk2")
            cfg.solver.integrator = Integrator::etd_rk2;
        else if (integ == "etd_rk4")
            cfg.solver.integrator = Integrator::etd_rk4;
        else
            throw std::invalid_argument(
                "config error at $.solver.integrator: expected etd_rk2|etd_rk4");
        if (!(cfg.solver.dt > 0.0) || !(cfg.solver.t_end > 0.0) ||
            cfg.solver.output_every < 1)
            throw std::invalid_argument("config error at $.solver: dt, t_end, "
                                        "output_every must be positive");
    }
    if (doc.contains("initial")) {
        const json& i = doc["initial"];
        check_keys(i, "$.initial", {"kind", "k1", "k2", "amplitude", "width", "slope"});
        cfg.initial.kind = get_str(i, "$.initial", "kind", cfg.initial.kind);
        if (cfg.initial.kind != "taylor_green" && cfg.initial.kind != "random_band" &&
            cfg.initial.kind != "localized_bump")
            throw std::invalid_argument("config error at $.initial.kind: expected "
                                        "taylor_green|random_band|localized_bump");
        cfg.initial.k1 = get_num(i, "$.initial", "k1", cfg.initial.k1);
        cfg.initial.k2 = get_num(i, "$.initial", "k2", cfg.initial.k2);
        cfg.initial.amplitude = get_num(i, "$.initial", "amplitude", cfg.initial.amplitude);
        cfg.initial.width = get_num(i, "$.initial", "width", cfg.initial.width);
        cfg.initial.slope = get_num(i, "$.initial", "slope", cfg.initial.slope);
    }
    if (doc.contains("diagnostics")) {
        const json& d = doc["diagnostics"];
        check_keys(d, "$.diagnostics", {"cylinder_ladder", "eps", "lambda_ladder"});
        cfg.diagnostics.cylinder_ladder = get_vec(d, "$.diagnostics", "cylinder_ladder");
        cfg.diagnostics.eps = get_num(d, "$.diagnostics", "eps", cfg.diagnostics.eps);
        cfg.diagnostics.lambda_ladder = get_vec(d, "$.diagnostics", "lambda_ladder");
    }
    cfg.output = get_str(doc, "$", "output", cfg.output);
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config error: cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config error: invalid JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

VectorField initial_from_config(const RunConfig& cfg, const TorusGrid& g) {
    InitialParams p;
    p.k1 = cfg.initial.k1;
    p.k2 = cfg.initial.k2;
    p.seed = cfg.solver.seed;
    p.amplitude = cfg.initial.amplitude;
    p.width = cfg.initial.width;
    p.slope = cfg.initial.slope;
    InitialKind kind = InitialKind::random_band;
    if (cfg.initial.kind == "taylor_green") kind = InitialKind::taylor_green;
    if (cfg.initial.kind == "localized_bump") kind = InitialKind::localized_bump;
    return make_initial(g, kind, p);
}

namespace {

std::filesystem::path outp(const std::string& dir, const std::string& name) {
    return std::filesystem::path(dir) / name;
}

int cmd_simulate(const RunConfig& cfg) {
    TorusGrid g(cfg.n, cfg.L);
    VectorField u0 = initial_from_config(cfg, g);
    Trajectory traj = run(cfg.solver, g, u0);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        rows.push_back({traj.times[i], traj.energy[i], traj.dissipation[i]});
    write_csv(outp(cfg.output, "energy.csv").string(), {"t", "energy", "dissipation"}, rows);

    std::vector<double> ts = traj.times;
    CurveSeries se{"energy", traj.energy}, sd{"dissipation", traj.dissipation};
    write_svg_curves(outp(cfg.output, "energy.svg").string(), "energy balance", ts,
                     {se, sd});
    write_field(outp(cfg.output, "final_u.fns").string(), traj.frames.back(), cfg.s);

    json body;
    body["operation"] = "simulate";
    body["seed"] = cfg.solver.seed;
    body["resolution"] = cfg.n;
    body["frames"] = traj.frames.size();
    body["final_time"] = traj.times.back();
    body["final_energy"] = traj.energy.back();
    body["energy_balance_residual"] =
        traj.energy_residual(traj.times.size() - 1) / traj.energy.front();
    write_json_report(outp(cfg.output, "simulate.json").string(), cfg.raw, body);
    std::printf("simulate: %zu frames to t=%g, relative energy residual %.3e\n",
                traj.frames.size(), traj.times.back(),
                traj.energy_residual(traj.times.size() - 1) / traj.energy.front());
    return 0;
}

int cmd_diagnose(const RunConfig& cfg) {
    TorusGrid g(cfg.n, cfg.L);
    VectorField u0 = initial_from_config(cfg, g);
    Trajectory traj = run(cfg.solver, g, u0);
    const VectorField& u = traj.frames.back();

    PressurePair pr = solve_pressure(u);
    ScaleOptimalF F = scale_optimal_F(u, pr, cfg.s);
    Ball whole{{0.0, 0.0, 0.0}, -1.0};
    double f_l1 = lp_norm(F.total, 1.0, whole);
    double fm_l1 = lp_norm(F.maximal_part, 1.0, whole);
    double fp_l1 = lp_norm(F.pressure_part, 1.0, whole);
    double fg_l1 = lp_norm(F.grand_part, 1.0, whole);

    ExtensionProfile profile = build_profile(cfg.s);
    std::vector<double> y_levels = make_y_levels(g, 64);
    std::vector<ScalarField> cells = scale_optimal_G(u, profile, y_levels, -1.0);
    double g_total = 0.0;
    for (const ScalarField& c : cells)
        for (double v : c.v) g_total += v;
    g_total *= std::pow(g.spacing(), 3);

    LeiTestFunction xi;
    xi.space = ScalarField(g);
    for (double& v : xi.space.v) v = 1.0;
    xi.height = [](double y) {
        if (y <= 0.5) return 1.0;
        if (y >= 2.5) return 0.0;
        double t = (y - 0.5) / 2.0;
        return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    };
    xi.height_d1 = [](double y) {
        if (y <= 0.5 || y >= 2.5) return 0.0;
        double t = (y - 0.5) / 2.0;
        return -30.0 * t * t * (1.0 - t) * (1.0 - t) / 2.0;
    };
    xi.height_d2 = [](double y) {
        if (y <= 0.5 || y >= 2.5) return 0.0;
        double t = (y - 0.5) / 2.0;
        return -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / 4.0;
    };
    xi.time_w = [](double) { return 1.0; };
    xi.time_d1 = [](double) { return 0.0; };
    double lei = local_energy_residual(traj, xi, profile, y_levels, 0,
                                       traj.frames.size() - 1);

    double p1 = derivative_exponent(cfg.s, 1);
    double wk = apriori_weak_lp_check(traj, 1, 0.5 * traj.times.back(),
                                      Ball{{0.5 * cfg.L, 0.5 * cfg.L, 0.5 * cfg.L},
                                           0.25 * cfg.L});

    write_csv(outp(cfg.output, "diagnostics.csv").string(),
              {"f_total_l1", "f_maximal_l1", "f_pressure_l1", "f_grand_l1",
               "g_energy", "lei_residual", "weak_lp_ratio"},
              {{f_l1, fm_l1, fp_l1, fg_l1, g_total, lei, wk}});

    json body;
    body["operation"] = "diagnose";
    body["seed"] = cfg.solver.seed;
    body["resolution"] = cfg.n;
    body["F_l1"] = {{"total", f_l1}, {"maximal", fm_l1}, {"pressure", fp_l1},
                    {"grand", fg_l1}};
    body["extension_energy"] = g_total;
    body["lei_residual"] = lei;
    body["weak_lp"] = {{"p", p1}, {"ratio", wk}};
    write_json_report(outp(cfg.output, "diagnose.json").string(), cfg.raw, body);
    std::printf("diagnose: F=%.4e, extension energy=%.4e, LEI residual=%.3e, "
                "weak-Lp ratio=%.3e\n",
                f_l1, g_total, lei, wk);
    return 0;
}

int cmd_scan(const RunConfig& cfg) {
    TorusGrid g(cfg.n, cfg.L);
    VectorField u0 = initial_from_config(cfg, g);
    Trajectory traj = run(cfg.solver, g, u0);

    std::vector<double> radii = cfg.diagnostics.cylinder_ladder;
    if (radii.empty()) radii = {cfg.L / 8.0, cfg.L / 10.0, cfg.L / 12.0};
    ScanReport rep = eps_regularity_scan(traj, cfg.s, cfg.diagnostics.eps, radii);

    std::vector<std::vector<double>> cyl_rows;
    for (const CylinderReport& c : rep.cylinders)
        cyl_rows.push_back({c.spec.x[0], c.spec.x[1], c.spec.x[2], c.spec.r,
                            c.extension_energy, c.slobodeckij, c.f_integral, c.cubic,
                            c.rescaled_sum, c.small ? 1.0 : 0.0});
    write_csv(outp(cfg.output, "cylinders.csv").string(),
              {"x", "y", "z", "r", "extension", "slobodeckij", "f", "cubic",
               "rescaled_sum", "small"},
              cyl_rows);
    std::vector<std::vector<double>> rung_rows;
    for (std::size_t i = 0; i < radii.size(); ++i)
        rung_rows.push_back({radii[i], double(rep.bad_count[i])});
    write_csv(outp(cfg.output, "scan.csv").string(), {"r", "bad_count"}, rung_rows);

    json body;
    body["operation"] = "scan";
    body["seed"] = cfg.solver.seed;
    body["resolution"] = cfg.n;
    body["eps"] = rep.eps;
    body["slope"] = rep.slope;
    body["dimension_bound"] = rep.dimension_bound;
    body["bad_count"] = rep.bad_count;
    body["cylinders"] = rep.cylinders.size();

    if (!cfg.diagnostics.lambda_ladder.empty()) {
        std::vector<LevelsetRow> rows =
            levelset_bound_check(traj, cfg.s, cfg.diagnostics.lambda_ladder, 1);
        std::vector<std::vector<double>> lv;
        for (const LevelsetRow& r : rows)
            lv.push_back({r.lambda, r.threshold, r.level_measure, r.slab_dissipation,
                          r.ratio, r.h_max, r.h_scale});
        write_csv(outp(cfg.output, "levelset.csv").string(),
                  {"lambda", "threshold", "measure", "slab_dissipation", "ratio",
                   "h_max", "h_scale"},
                  lv);
        json jr = json::array();
        for (const LevelsetRow& r : rows)
            jr.push_back({{"lambda", r.lambda}, {"ratio", r.ratio}, {"h_max", r.h_max}});
        body["levelset"] = jr;
    }
    write_json_report(outp(cfg.output, "scan.json").string(), cfg.raw, body);
    std::printf("scan: %zu cylinders, eps=%.4e, slope=%.3f, bound=%.3f\n",
                rep.cylinders.size(), rep.eps, rep.slope, rep.dimension_bound);
    return 0;
}

int cmd_operators(const std::string& op, const std::string& in_path,
                  const std::string& out_path, double gamma, double tval, int axis,
                  double beta, double R, double R0, int refine) {
    FieldFile in = read_field(in_path);
    if (op == "frac-lap") {
        if (in.ncomp == 1)
            write_field(out_path, fractional_laplacian(in.scalar, gamma), in.s);
        else
            write_field(out_path, fractional_laplacian(in.vector, gamma), in.s);
    } else if (op == "heat") {
        if (in.ncomp != 1) throw std::invalid_argument("heat: scalar input expected");
        write_field(out_path, fractional_heat(in.scalar, tval, in.s > 0 ? in.s : 0.8),
                    in.s);
    } else if (op == "riesz") {
        if (in.ncomp != 1) throw std::invalid_argument("riesz: scalar input expected");
        write_field(out_path, riesz_transform(in.scalar, axis), in.s);
    } else if (op == "maximal") {
        if (in.ncomp != 1) throw std::invalid_argument("maximal: scalar input expected");
        write_field(out_path, hardy_littlewood_max(in.scalar), in.s);
    } else if (op == "pressure") {
        if (in.ncomp != 3) throw std::invalid_argument("pressure: vector input expected");
        write_field(out_path, solve_pressure(in.vector).p, in.s);
    } else if (op == "commutator") {
        if (in.ncomp != 1)
            throw std::invalid_argument("commutator: scalar input expected");
        const TorusGrid& g = in.scalar.grid;
        CutoffPair cut = make_cutoff_pair(
            g, {0.5 * g.L, 0.5 * g.L, 0.5 * g.L}, R, R0);
        CommutatorPieces pieces = decomposed_commutator(cut, in.scalar, beta, refine);
        double cb = calibrate_cbeta(g, beta, refine);
        ScalarField ref = spectral_commutator(cut.phi, in.scalar, beta);
        for (double& v : ref.v) v *= cb;
        ScalarField sum = pieces.sum();
        double rel = rel_l2_error(sum, ref);
        std::filesystem::path base(out_path);
        std::filesystem::create_directories(base);
        write_field((base / "l1.fns").string(), pieces.l1, beta / 2.0);
        write_field((base / "l2.fns").string(), pieces.l2, beta / 2.0);
        write_field((base / "t1.fns").string(), pieces.t1, beta / 2.0);
        write_field((base / "t2.fns").string(), pieces.t2, beta / 2.0);
        write_field((base / "sum.fns").string(), sum, beta / 2.0);
        write_field((base / "spectral.fns").string(), ref, beta / 2.0);
        Ball whole{{0.0, 0.0, 0.0}, -1.0};
        write_csv((base / "commutator.csv").string(),
                  {"l1_l2", "l2_l2", "t1_l2", "t2_l2", "sum_l2", "spectral_l2",
                   "cbeta", "rel_error"},
                  {{lp_norm(pieces.l1, 2.0, whole), lp_norm(pieces.l2, 2.0, whole),
                    lp_norm(pieces.t1, 2.0, whole), lp_norm(pieces.t2, 2.0, whole),
                    lp_norm(sum, 2.0, whole), lp_norm(ref, 2.0, whole), cb, rel}});
        std::printf("commutator: relative L2 error vs spectral oracle %.4e\n", rel);
    } else {
        throw std::invalid_argument("unknown operator " + op);
    }
    return 0;
}

int cmd_curves(double s_min, double s_max, double step, const std::string& out_dir) {
    if (!(step > 0.0) || !(s_max >= s_min))
        throw std::invalid_argument("curves: need s_max >= s_min and step > 0");
    std::vector<double> xs;
    std::vector<CurveSeries> series{{"suitable_bound", {}}, {"leray_bound", {}}};
    std::vector<std::vector<double>> rows;
    for (double s = s_min; s <= s_max + 1e-12; s += step) {
        double suitable = (15.0 - 2.0 * s - 8.0 * s * s) / 3.0;
        double leray = (-16.0 * s * s + 16.0 * s + 5.0) / 3.0;
        xs.push_back(s);
        series[0].y.push_back(suitable);
        series[1].y.push_back(leray);
        rows.push_back({s, suitable, leray});
    }
    write_csv(outp(out_dir, "curves.csv").string(),
              {"s", "suitable_bound", "leray_bound"}, rows);
    write_svg_curves(outp(out_dir, "curves.svg").string(),
                     "singular-set dimension bounds", xs, series);
    std::printf("curves: %zu samples in [%g, %g] -> %s\n", xs.size(), s_min, s_max,
                out_dir.c_str());
    return 0;
}

int cmd_verify(bool quick, const std::string& reports_dir) {
    if (!reports_dir.empty()) check_report_directory(reports_dir);
    std::vector<CriterionResult> results = run_acceptance(quick);
    int failures = 0;
    for (const CriterionResult& r : results)
        if (!r.pass && !r.skipped) ++failures;
    if (failures > 0) {
        std::printf("verify: %d criteria FAILED\n", failures);
        return 1;
    }
    std::printf("verify: all executed criteria passed\n");
    return 0;
}

}  // namespace

int cli_dispatch(int argc, char** argv) {
    CLI::App app{"fractional Navier-Stokes simulator and diagnostics suite"};
    app.require_subcommand(1);

    std::string config_path, out_override;

    auto* sim = app.add_subcommand("simulate", "run the dissipative solver");
    sim->add_option("--config", config_path, "JSON run configuration")->required();
    sim->add_option("--out", out_override, "output directory override");

    auto* diag = app.add_subcommand("diagnose", "scale-optimal F/G, LEI, weak-Lp");
    diag->add_option("--config", config_path, "JSON run configuration")->required();
    diag->add_option("--out", out_override, "output directory override");

    auto* scan = app.add_subcommand("scan", "cylinder regularity scan + level sets");
    scan->add_option("--config", config_path, "JSON run configuration")->required();
    scan->add_option("--out", out_override, "output directory override");

    std::string op, in_path, out_path = "out";
    double gamma = 1.0, tval = 0.1, beta = 1.6, R = 1.6, R0 = 2.9;
    int axis = 1, refine = 2;
    auto* ops = app.add_subcommand("operators", "apply library operators to field files");
    ops->add_option("op", op,
                    "frac-lap|heat|riesz|maximal|pressure|commutator")->required();
    ops->add_option("--in", in_path, "input FNS1 field")->required();
    ops->add_option("--out", out_path, "output file (or directory for commutator)");
    ops->add_option("--gamma", gamma, "fractional order for frac-lap");
    ops->add_option("--time", tval, "time for the heat semigroup");
    ops->add_option("--axis", axis, "Riesz transform axis (1..3)");
    ops->add_option("--beta", beta, "commutator kernel order");
    ops->add_option("--radius", R, "commutator bump radius");
    ops->add_option("--outer", R0, "commutator outer radius");
    ops->add_option("--refine", refine, "commutator quadrature refinement");

    bool quick = false;
    std::string reports_dir;
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_flag("--quick", quick, "fast criteria only");
    verify->add_option("--reports", reports_dir, "refuse mixed-version report dirs");

    double s_min = 0.75, s_max = 1.25, step = 0.01;
    auto* curves = app.add_subcommand("curves", "dimension-bound polynomials as CSV/SVG");
    curves->add_option("--s-min", s_min, "lower end of the s range");
    curves->add_option("--s-max", s_max, "upper end of the s range");
    curves->add_option("--step", step, "sampling step");
    curves->add_option("--out", out_path, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed() || diag->parsed() || scan->parsed()) {
            RunConfig cfg = load_run_config(config_path);
            if (!out_override.empty()) cfg.output = out_override;
            if (sim->parsed()) return cmd_simulate(cfg);
            if (diag->parsed()) return cmd_diagnose(cfg);
            return cmd_scan(cfg);
        }
        if (ops->parsed())
            return cmd_operators(op, in_path, out_path, gamma, tval, axis, beta, R, R0,
                                 refine);
        if (verify->parsed()) return cmd_verify(quick, reports_dir);
        if (curves->parsed()) return cmd_curves(s_min, s_max, step, out_path);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 3;
    }
    return 0;
}

}  // namespace fracns
