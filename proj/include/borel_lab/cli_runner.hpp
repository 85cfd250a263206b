#pragma once
// Run configuration, the stage pipeline (validate, solve, continuation, transform,
// sweep, report) and the files each stage writes. All outputs are functions of the
// configuration and the seed alone; timings go to the console only.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "borel_lab/asymptotics.hpp"
#include "borel_lab/borel_solver.hpp"
#include "borel_lab/problem_model.hpp"

namespace borel_lab {

struct RunConfig {
    std::string scenario = "scenario-a";  // used when neither spec_path nor inline_spec is set
    std::string spec_path;
    std::optional<ProblemSpec> inline_spec;

    SolverConfig solver;                     // disc solves (representation, tolerance, N_max)
    std::vector<cplx> solve_eps;             // Picard solves reported in borel_convergence.csv
    double sector_R1 = 2.0, sector_R2 = 4.0;  // radial extent of sector grids

    int varsigma = 12;
    double overlap_deg = 10.0;
    double r_T = 0.5, T_half_deg = 5.0, beta_prime = 0.5;

    int eps_samples = 12;
    double eps_hi_frac = 0.5, eps_lo_frac = 1.0 / 40.0;
    int points = 8;
    std::vector<int> links;  // empty = every link of the covering
    bool tails = true;       // J2 / J3 sweeps

    std::vector<cplx> split_eps;  // sector solves for split_identity.csv
    int split_points = 10;        // per eps

    bool allow_invalid = false;
    std::string out_dir = "borel_lab_out";
    int workers = 0;
    std::uint64_t seed = 20240917;

    RunConfig();
    void check() const;  // ConfigError on out-of-range values
};

// JSON with "config_version": 1; unknown keys are rejected (ConfigError).
RunConfig config_from_json_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

ProblemSpec resolve_spec(const RunConfig& cfg);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunSummary {
    int exit_code = 0;  // 0 ok, 1 mathematical failure, 2 configuration error
    std::string failed_stage;
    std::string message;
    std::vector<StageTiming> timings;
    std::vector<std::string> files;  // relative to out_dir, in write order
};

// Stages among "validate", "solve", "continuation", "transform", "sweep"; "report" runs
// them all. Errors stop the run and are reported in the summary, never thrown.
RunSummary run_scenario(const RunConfig& cfg, const std::vector<std::string>& stages);

// The command line: subcommands validate, solve, transform, sweep, report.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace borel_lab
