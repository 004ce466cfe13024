#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fracns/solver.hpp"

namespace fracns {

struct DiagnosticsConfig {
    std::vector<double> cylinder_ladder;  // probe cylinder radii
    double eps = -1.0;                    // <= 0: self-calibrate
    std::vector<double> lambda_ladder;    // level-set rungs
};

struct InitialConfig {
    std::string kind = "random_band";  // taylor_green | random_band | localized_bump
    double k1 = 1.0, k2 = 4.0;
    double amplitude = 1.0;
    double width = 0.7;
    double slope = 0.0;
};

// Top-level run configuration, parsed from a JSON document:
//   {mode, s, grid:{n, L}, solver:{dt, t_end, integrator, seed},
//    initial:{...}, diagnostics:{cylinder_ladder, eps, lambda_ladder}, output}
// Every object is schema-checked: unknown keys are rejected with the schema
// path in the message, and s must lie in (3/4, 1).
struct RunConfig {
    std::string mode = "simulate";
    double s = 0.8;
    int n = 32;
    double L = 2.0 * M_PI;
    SolverConfig solver;  // s mirrored into it
    InitialConfig initial;
    DiagnosticsConfig diagnostics;
    std::string output = "out";
    nlohmann::json raw;  // the validated document (for hashing/reports)
};

RunConfig parse_run_config(const nlohmann::json& doc);       // errors: invalid_argument
RunConfig load_run_config(const std::string& path);          // + file errors

VectorField initial_from_config(const RunConfig& cfg, const TorusGrid& g);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    bool skipped = false;
    std::string detail;
};

// The thirteen pinned acceptance checks; prints one PASS/FAIL line per
// criterion as it completes.  quick runs only the fast subset and marks the
// rest skipped.
std::vector<CriterionResult> run_acceptance(bool quick);

// Exit codes: 0 success, 1 acceptance failure, 2 configuration error,
// 3 numerical abort.
int cli_dispatch(int argc, char** argv);

}  // namespace fracns
