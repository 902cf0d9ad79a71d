#include "adamregret/commands.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "adamregret/analysis.hpp"
#include "adamregret/conjecture.hpp"
#include "adamregret/errors.hpp"
#include "adamregret/keyvalue.hpp"
#include "adamregret/rng.hpp"

namespace adamregret {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << contents;
    if (!out) throw ConfigError("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

RunConfig parse_run_config_kv(const KeyValues& kv, const fs::path& base_dir) {
    kv.reject_unknown({"problem", "optimizer", "label", "eta", "beta1", "beta2", "lambda",
                       "epsilon", "alpha", "T", "T_schedule", "seed", "w0", "grad_norm_tol"});
    RunConfig cfg;
    fs::path problem = kv.require_string("problem");
    cfg.problem_spec = problem.is_absolute() ? problem : base_dir / problem;
    cfg.optimizer = parse_optimizer_kind(kv.get_string("optimizer", "adam"));
    cfg.label = kv.get_string("label", std::string(to_string(cfg.optimizer)));
    cfg.params.eta = kv.get_double("eta", cfg.params.eta);
    cfg.params.beta1 = kv.get_double("beta1", cfg.params.beta1);
    cfg.params.beta2 = kv.get_double("beta2", cfg.params.beta2);
    cfg.params.lambda = kv.get_double("lambda", cfg.params.lambda);
    cfg.params.epsilon = kv.get_double("epsilon", cfg.params.epsilon);
    cfg.params.alpha = kv.get_double("alpha", cfg.params.alpha);
    cfg.T = kv.require_uint("T");
    for (auto v : kv.get_uint_list("T_schedule")) cfg.T_schedule.push_back(v);
    cfg.seed = kv.get_uint("seed", 0);
    cfg.w0 = kv.get_string("w0", "random");
    cfg.grad_norm_tol = kv.get_double("grad_norm_tol", 0.0);

    if (cfg.T < 1) throw ConfigError(kv.source() + ": T must be at least 1");
    for (std::size_t k = 0; k < cfg.T_schedule.size(); ++k) {
        if (cfg.T_schedule[k] < 1 || (k > 0 && cfg.T_schedule[k] <= cfg.T_schedule[k - 1])) {
            throw ConfigError(kv.source() + ": T_schedule must be positive and strictly increasing");
        }
    }
    try {
        cfg.params.validate();
    } catch (const InvalidParams& e) {
        throw ConfigError(kv.source() + ": " + e.what());
    }
    return cfg;
}

std::string report_bound_text(const BoundReport& r, const HyperParams& p) {
    std::ostringstream os;
    write_bound_report_text(os, r, p);
    return os.str();
}

// Copy of the first T records of `full`.
Trajectory prefix(const Trajectory& full, std::size_t T) {
    Trajectory out(full.dim(), full.params());
    for (std::size_t t = 1; t <= T; ++t) out.append(full.at(t));
    return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir) {
    return parse_run_config_kv(KeyValues::parse_string(text, "<run config>"), base_dir);
}

RunConfig load_run_config(const fs::path& path) {
    return parse_run_config_kv(KeyValues::load(path), path.parent_path());
}

Vector initial_point(const RunConfig& cfg, std::size_t d) {
    if (cfg.w0 == "zeros") return Vector(d, 0.0);
    if (cfg.w0 == "random") {
        Rng rng = seeded_rng(cfg.seed);
        Vector w(d);
        for (auto& x : w) x = rng.uniform(-1.0, 1.0);
        return w;
    }
    KeyValues kv = KeyValues::parse_string("w0 = " + cfg.w0, "<w0>");
    Vector w = kv.get_double_list("w0");
    if (w.size() != d) {
        throw ConfigError("w0 lists " + std::to_string(w.size()) + " values, problem has d = " +
                          std::to_string(d));
    }
    return w;
}

ExitCode cmd_run(const RunConfig& cfg, const fs::path& out_dir, std::ostream& err) {
    try {
        if (cfg.optimizer != OptimizerKind::adam) {
            err << "error: run evaluates the ADAM regret bound; use race for gd/momentum\n";
            return ExitCode::config_error;
        }
        cfg.params.validate();
        const ConvexProblem problem = build_problem(load_problem_spec(cfg.problem_spec));
        const Vector w0 = initial_point(cfg, problem.dim());
        const std::size_t T_total =
            std::max(cfg.T, cfg.T_schedule.empty() ? std::size_t{0} : cfg.T_schedule.back());

        const GradOracle oracle = problem.oracle();
        RunOptions ropts;
        ropts.grad_norm_tol = cfg.grad_norm_tol;
        const Trajectory full = adam_run(w0, oracle, cfg.params, T_total, ropts);
        if (full.horizon() < cfg.T) {
            err << "note: gradient-norm stop after " << full.horizon() << " steps\n";
        }
        const std::size_t T_main = std::min(cfg.T, full.horizon());
        if (T_main == 0) {
            err << "error: gradient-norm stop fired before the first step\n";
            return ExitCode::numeric_failure;
        }
        const Trajectory traj = T_main == full.horizon() ? full : prefix(full, T_main);
        const Minimizer w_star = minimizer_oracle(problem, T_main);
        const BoundReport report = theorem_bound(traj, problem, w_star);

        std::vector<BoundReport> rows{report};
        std::vector<std::string> labels{"epsilon"};
        std::string eps0_note;
        {
            HyperParams p0 = cfg.params;
            p0.epsilon = 0.0;
            try {
                const Trajectory t0 = adam_run(w0, oracle, p0, T_main, ropts);
                if (t0.horizon() == T_main) {
                    rows.push_back(theorem_bound(t0, problem, w_star));
                    labels.push_back("no_epsilon");
                } else {
                    eps0_note = "epsilon = 0 run stopped early; no row written\n";
                }
            } catch (const NumericError& e) {
                eps0_note = std::string("epsilon = 0 run failed: ") + e.what() + "\n";
            }
        }

        std::ostringstream traj_csv, bound_csv, text;
        write_trajectory_csv(traj_csv, traj);
        write_bound_report_csv(bound_csv, rows, labels);
        text << "ADAM regret bound report\n"
             << "problem               " << to_string(problem.kind()) << " ("
             << cfg.problem_spec.filename().string() << ")\n"
             << "minimizer stationarity " << format_double(w_star.stationarity) << " (tolerance "
             << format_double(w_star.tolerance) << ")\n\n"
             << "[run with epsilon = " << format_double(cfg.params.epsilon) << "]\n"
             << report_bound_text(report, cfg.params);
        if (rows.size() > 1) {
            HyperParams p0 = cfg.params;
            p0.epsilon = 0.0;
            text << "\n[run with epsilon = 0]\n" << report_bound_text(rows[1], p0);
        }
        if (!eps0_note.empty()) text << '\n' << eps0_note;

        std::string series_csv;
        if (!cfg.T_schedule.empty()) {
            std::vector<BoundReport> per_T;
            for (std::size_t Tk : cfg.T_schedule) {
                if (Tk > full.horizon()) break;
                const Trajectory tk = prefix(full, Tk);
                per_T.push_back(theorem_bound(tk, problem, minimizer_oracle(problem, Tk)));
            }
            text << "\n[average regret series]\n";
            try {
                const RegretSeries series = average_regret_series(per_T);
                std::ostringstream os;
                write_series_csv(os, series);
                series_csv = os.str();
                text << "fitted slope of log(bound/T) vs log T: " << format_double(series.slope)
                     << '\n';
            } catch (const InsufficientDataError& e) {
                text << "not fitted: " << e.what() << '\n';
            }
        }

        ensure_dir(out_dir);
        write_file(out_dir / "trajectory.csv", traj_csv.str());
        write_file(out_dir / "bound_report.csv", bound_csv.str());
        write_file(out_dir / "report.txt", text.str());
        if (!series_csv.empty()) write_file(out_dir / "corollary.csv", series_csv);
        return ExitCode::ok;
    } catch (const UnboundedMinimizerError& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::unbounded_minimizer;
    } catch (const NumericError& e) {
        err << "error: numeric failure at step " << e.step() << ": " << e.what() << '\n';
        return ExitCode::numeric_failure;
    } catch (const InvalidParams& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::config_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::config_error;
    }
}

ExitCode cmd_race(const std::vector<RunConfig>& cfgs, const fs::path& out_dir, std::ostream& err) {
    try {
        if (cfgs.size() < 2) {
            err << "error: race needs at least two configs\n";
            return ExitCode::config_error;
        }
        const ProblemSpec spec = load_problem_spec(cfgs.front().problem_spec);
        for (const auto& c : cfgs) {
            c.params.validate();
            if (load_problem_spec(c.problem_spec) != spec) {
                err << "error: race members use different problems (" << c.problem_spec.string()
                    << ")\n";
                return ExitCode::config_error;
            }
            if (c.T != cfgs.front().T) {
                err << "error: race members use different horizons T\n";
                return ExitCode::config_error;
            }
        }
        const ConvexProblem problem = build_problem(spec);
        const Vector w0 = initial_point(cfgs.front(), problem.dim());
        for (const auto& c : cfgs) {
            if (initial_point(c, problem.dim()) != w0) {
                err << "error: race members start from different initial points\n";
                return ExitCode::config_error;
            }
        }
        const std::size_t T = cfgs.front().T;
        const GradOracle oracle = problem.oracle();

        std::vector<Vector> curves(cfgs.size());
        std::vector<std::string> failures(cfgs.size());
        {
            std::vector<std::jthread> pool;
            for (std::size_t k = 0; k < cfgs.size(); ++k) {
                pool.emplace_back([&, k] {
                    try {
                        curves[k] = training_curve(cfgs[k].optimizer, w0, oracle, cfgs[k].params, T);
                    } catch (const std::exception& e) {
                        failures[k] = e.what();
                    }
                });
            }
        }
        for (std::size_t k = 0; k < cfgs.size(); ++k) {
            if (!failures[k].empty()) {
                err << "error: " << cfgs[k].label << ": " << failures[k] << '\n';
                return ExitCode::numeric_failure;
            }
        }

        std::ostringstream csv;
        csv << "step,optimizer,objective_value\n";
        for (std::size_t k = 0; k < cfgs.size(); ++k) {
            for (std::size_t t = 0; t < T; ++t) {
                csv << (t + 1) << ',' << cfgs[k].label << ',' << format_double(curves[k][t]) << '\n';
            }
        }
        ensure_dir(out_dir);
        write_file(out_dir / "race.csv", csv.str());
        return ExitCode::ok;
    } catch (const NumericError& e) {
        err << "error: numeric failure at step " << e.step() << ": " << e.what() << '\n';
        return ExitCode::numeric_failure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::config_error;
    }
}

std::vector<HyperParams> load_grid(const fs::path& path) {
    const KeyValues kv = KeyValues::load(path);
    kv.reject_unknown({"beta1", "beta2", "lambda"});
    const Vector b1 = kv.get_double_list("beta1");
    const Vector b2 = kv.get_double_list("beta2");
    const Vector lam = kv.get_double_list("lambda");
    if (b1.empty() || b1.size() != b2.size() || b1.size() != lam.size()) {
        throw ConfigError(path.string() + ": beta1, beta2 and lambda must be nonempty lists of equal length");
    }
    std::vector<HyperParams> grid;
    for (std::size_t k = 0; k < b1.size(); ++k) {
        HyperParams p;
        p.beta1 = b1[k];
        p.beta2 = b2[k];
        p.lambda = lam[k];
        try {
            p.validate();
        } catch (const InvalidParams& e) {
            throw ConfigError(path.string() + ": grid entry " + std::to_string(k) + ": " + e.what());
        }
        grid.push_back(p);
    }
    return grid;
}

ExitCode cmd_fuzz(const FuzzOptions& opts, const fs::path& out_dir, std::ostream& err) {
    try {
        FuzzConfig cfg;
        cfg.n_trials = opts.trials;
        cfg.T_max = opts.T_max;
        cfg.d = opts.d;
        cfg.seed = opts.seed;
        cfg.threads = opts.threads;
        cfg.grid = opts.grid_path ? load_grid(*opts.grid_path) : default_conjecture_grid();
        if (cfg.T_max == 0 || cfg.d == 0) {
            err << "error: --tmax and --d must be at least 1\n";
            return ExitCode::config_error;
        }
        for (const auto& path : opts.inject) {
            Counterexample cx = load_counterexample(path);
            cx.candidate.family = GradFamily::injected;
            cfg.injected.push_back(std::move(cx.candidate));
        }

        const FuzzSummary summary = conjecture_fuzz(cfg);

        std::ostringstream text, near;
        write_fuzz_summary(text, cfg, summary);
        write_near_misses_csv(near, summary);
        const std::size_t n_files = std::min(summary.violations.size(), opts.max_counterexamples);
        if (summary.violations.size() > n_files) {
            text << "serialized the first " << n_files << " violations to counterexamples/\n";
        }

        ensure_dir(out_dir);
        const fs::path cx_dir = out_dir / "counterexamples";
        ensure_dir(cx_dir);
        for (const auto& entry : fs::directory_iterator(cx_dir)) {
            if (entry.path().extension() == ".txt") fs::remove(entry.path());
        }
        write_file(out_dir / "fuzz_summary.txt", text.str());
        write_file(out_dir / "near_misses.csv", near.str());
        for (std::size_t k = 0; k < n_files; ++k) {
            std::ostringstream os;
            write_counterexample(os, summary.violations[k]);
            write_file(cx_dir / ("cx_" + std::to_string(summary.violations[k].trial) + ".txt"),
                       os.str());
        }
        return summary.violations.empty() ? ExitCode::ok : ExitCode::violation_found;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::config_error;
    }
}

ExitCode cmd_replay(const fs::path& file, std::ostream& out, std::ostream& err) {
    try {
        const Counterexample cx = load_counterexample(file);
        const ReplayResult r = replay_counterexample(cx);
        out << "recorded slack  " << format_double(r.recorded_slack) << '\n'
            << "replayed slack  " << format_double(r.replayed_slack) << '\n'
            << "relative diff   " << format_double(r.relative_difference) << '\n'
            << "violated        " << (r.violated ? "yes" : "no") << '\n';
        if (r.relative_difference > 1e-12) {
            err << "error: replay does not reproduce the recorded slack\n";
            return ExitCode::numeric_failure;
        }
        return ExitCode::ok;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::config_error;
    }
}

}  // namespace adamregret
