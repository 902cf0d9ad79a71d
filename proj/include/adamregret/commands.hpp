#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adamregret/core.hpp"
#include "adamregret/optimizers.hpp"
#include "adamregret/problems.hpp"

namespace adamregret {

/// Process exit codes of the command-line front end.
enum class ExitCode : int {
    ok = 0,
    config_error = 1,
    numeric_failure = 2,
    unbounded_minimizer = 3,
    violation_found = 10,
};

/// Run configuration file (key = value):
///
///   problem       = path to a problem spec, relative to this file   (required)
///   optimizer     = gd | momentum | adam                             (default adam)
///   label         = name used in race.csv                            (default: optimizer)
///   eta beta1 beta2 lambda epsilon alpha                             (HyperParams defaults)
///   T             = horizon                                          (required)
///   T_schedule    = strictly increasing horizons for the rate series (optional)
///   seed          = seed for a random initial point                  (default 0)
///   w0            = zeros | random | list of d numbers               (default random, U[-1,1]^d)
///   grad_norm_tol = optional early stop on |g|_2                     (default 0, off)
struct RunConfig {
    std::filesystem::path problem_spec;
    OptimizerKind optimizer = OptimizerKind::adam;
    std::string label;
    HyperParams params;
    std::size_t T = 0;
    std::vector<std::size_t> T_schedule;
    std::uint64_t seed = 0;
    std::string w0 = "random";
    double grad_norm_tol = 0.0;
};

/// Parses and validates a run config. Throws ConfigError (including for
/// hyperparameters outside their ranges, e.g. gamma >= 1).
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);

/// Initial point of a run: zeros, U[-1,1]^d from seeded_rng(seed), or the listed values.
Vector initial_point(const RunConfig& cfg, std::size_t d);

/// `run`: ADAM on the configured problem, writing trajectory.csv,
/// bound_report.csv (rows for the configured epsilon and for epsilon = 0),
/// report.txt and, with a T_schedule, corollary.csv.
ExitCode cmd_run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& err);

/// `race`: training curves of two or more configs on the same problem and
/// horizon, written to race.csv (step,optimizer,objective_value).
ExitCode cmd_race(const std::vector<RunConfig>& cfgs, const std::filesystem::path& out_dir,
                  std::ostream& err);

struct FuzzOptions {
    std::size_t trials = 1000;
    std::size_t T_max = 64;
    std::size_t d = 1;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> grid_path;  // keys beta1, beta2, lambda: equal-length lists
    std::vector<std::filesystem::path> inject;       // counterexample files screened after the trials
    std::size_t max_counterexamples = 100;            // serialized files; the summary lists all
    std::size_t threads = 0;
};

/// Grid file: `beta1 = ...`, `beta2 = ...`, `lambda = ...` as equal-length lists.
std::vector<HyperParams> load_grid(const std::filesystem::path& path);

/// `fuzz`: writes fuzz_summary.txt, near_misses.csv and counterexamples/.
/// Returns violation_found when a violation was confirmed in extended precision.
ExitCode cmd_fuzz(const FuzzOptions& opts, const std::filesystem::path& out_dir,
                  std::ostream& err);

/// `replay`: re-evaluates a counterexample file. ok when the recorded slack is
/// reproduced to 1e-12 relative, numeric_failure otherwise.
ExitCode cmd_replay(const std::filesystem::path& file, std::ostream& out, std::ostream& err);

}  // namespace adamregret
