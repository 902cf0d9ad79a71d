#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "adamregret/analysis.hpp"
#include "adamregret/commands.hpp"
#include "adamregret/conjecture.hpp"
#include "adamregret/errors.hpp"
#include "adamregret/optimizers.hpp"
#include "adamregret/problems.hpp"

namespace py = pybind11;
namespace ar = adamregret;

namespace {

py::dict record_dict(const ar::StepRecord& r) {
    py::dict d;
    d["t"] = r.t;
    d["w_before"] = r.w_before;
    d["g"] = r.g;
    d["e"] = r.e;
    d["m_hat"] = r.m_hat;
    d["v_hat"] = r.v_hat;
    d["w_after"] = r.w_after;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "ADAM with decaying first-moment rate, regret bound evaluation and moment-ratio probing";

    auto base = py::register_exception<ar::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ar::InvalidParams>(m, "InvalidParams", base.ptr());
    py::register_exception<ar::ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ar::NumericError>(m, "NumericError", base.ptr());
    py::register_exception<ar::UnboundedMinimizerError>(m, "UnboundedMinimizerError", base.ptr());

    py::class_<ar::HyperParams>(m, "HyperParams")
        .def(py::init([](double eta, double beta1, double beta2, double lambda_, double epsilon,
                         double alpha) {
                 return ar::HyperParams{eta, beta1, beta2, lambda_, epsilon, alpha};
             }),
             py::arg("eta") = 0.001, py::arg("beta1") = 0.9, py::arg("beta2") = 0.999,
             py::arg("lambda_") = 0.999, py::arg("epsilon") = 1e-8, py::arg("alpha") = 0.9)
        .def_readwrite("eta", &ar::HyperParams::eta)
        .def_readwrite("beta1", &ar::HyperParams::beta1)
        .def_readwrite("beta2", &ar::HyperParams::beta2)
        .def_readwrite("lambda_", &ar::HyperParams::lambda)
        .def_readwrite("epsilon", &ar::HyperParams::epsilon)
        .def_readwrite("alpha", &ar::HyperParams::alpha)
        .def_property_readonly("gamma", &ar::HyperParams::gamma)
        .def("beta1_at", &ar::HyperParams::beta1_at)
        .def("validate", &ar::HyperParams::validate)
        .def("__repr__", [](const ar::HyperParams& p) {
            return "HyperParams(eta=" + ar::format_double(p.eta) + ", beta1=" + ar::format_double(p.beta1) +
                   ", beta2=" + ar::format_double(p.beta2) + ", lambda_=" + ar::format_double(p.lambda) +
                   ", epsilon=" + ar::format_double(p.epsilon) + ")";
        });

    py::class_<ar::AdamState>(m, "AdamState")
        .def_static("fresh", [](const ar::Vector& w0) { return ar::AdamState::fresh(w0); })
        .def_readonly("t", &ar::AdamState::t)
        .def_readonly("m", &ar::AdamState::m)
        .def_readonly("v", &ar::AdamState::v)
        .def_readonly("w", &ar::AdamState::w);

    m.def(
        "adam_step",
        [](const ar::AdamState& st, const ar::Vector& g, const ar::HyperParams& p) {
            auto r = ar::adam_step(st, g, p);
            return py::make_tuple(r.state, record_dict(r.record));
        },
        py::arg("state"), py::arg("g"), py::arg("params"));
    m.def("gd_step", [](const ar::Vector& w, const ar::Vector& g, double eta) { return ar::gd_step(w, g, eta); });

    py::class_<ar::Trajectory>(m, "Trajectory")
        .def_property_readonly("horizon", &ar::Trajectory::horizon)
        .def_property_readonly("dim", &ar::Trajectory::dim)
        .def("record", [](const ar::Trajectory& t, std::size_t step) { return record_dict(t.at(step)); })
        .def("iterates", &ar::Trajectory::iterates)
        .def("replay_matches", [](const ar::Trajectory& t) { return ar::replay_matches(t); });

    m.def(
        "adam_run",
        [](const ar::Vector& w0, const std::function<py::tuple(const ar::Vector&, std::size_t)>& fn,
           const ar::HyperParams& p, std::size_t T) {
            ar::GradOracle oracle = [&fn](std::span<const double> w, std::size_t t) {
                py::gil_scoped_acquire gil;
                const py::tuple res = fn(ar::Vector(w.begin(), w.end()), t);
                return ar::Evaluation{res[0].cast<double>(), res[1].cast<ar::Vector>()};
            };
            return ar::adam_run(w0, oracle, p, T);
        },
        py::arg("w0"), py::arg("oracle"), py::arg("params"), py::arg("T"),
        "Runs T steps; oracle(w, t) returns (value, gradient).");

    py::class_<ar::ConvexProblem>(m, "ConvexProblem")
        .def_static("from_spec", [](const std::string& text) { return ar::build_problem(ar::parse_problem_spec(text)); })
        .def_property_readonly("dim", &ar::ConvexProblem::dim)
        .def_property_readonly("kind", [](const ar::ConvexProblem& p) { return std::string(ar::to_string(p.kind())); })
        .def("evaluate",
             [](const ar::ConvexProblem& p, const ar::Vector& w, std::size_t t) {
                 auto ev = p.evaluate(w, t);
                 return py::make_tuple(ev.value, ev.grad);
             })
        .def("run_adam",
             [](const ar::ConvexProblem& p, const ar::Vector& w0, const ar::HyperParams& hp, std::size_t T) {
                 py::gil_scoped_release release;
                 return ar::adam_run(w0, p.oracle(), hp, T);
             })
        .def("minimizer", [](const ar::ConvexProblem& p, std::size_t T) { return ar::minimizer_oracle(p, T).w; })
        .def("convexity_gap", [](const ar::ConvexProblem& p, const ar::Vector& x, const ar::Vector& y,
                                 std::size_t t) { return ar::convexity_gap(p, x, y, t); });

    py::class_<ar::BoundReport>(m, "BoundReport")
        .def_readonly("T", &ar::BoundReport::T)
        .def_readonly("d", &ar::BoundReport::d)
        .def_readonly("regret", &ar::BoundReport::regret)
        .def_readonly("D_inf", &ar::BoundReport::D_inf)
        .def_readonly("D_2", &ar::BoundReport::D_2)
        .def_readonly("G_inf", &ar::BoundReport::G_inf)
        .def_readonly("G_2", &ar::BoundReport::G_2)
        .def_readonly("term1", &ar::BoundReport::term1)
        .def_readonly("term2", &ar::BoundReport::term2)
        .def_readonly("term3", &ar::BoundReport::term3)
        .def_readonly("bound", &ar::BoundReport::bound)
        .def_readonly("slack", &ar::BoundReport::slack);

    m.def(
        "theorem_bound",
        [](const ar::Trajectory& traj, const ar::ConvexProblem& p) {
            return ar::theorem_bound(traj, p, ar::minimizer_oracle(p, traj.horizon()));
        },
        py::arg("trajectory"), py::arg("problem"));
    m.def("geometric_sum_closed_form", &ar::geometric_sum_closed_form, py::arg("lambda_"), py::arg("T"));

    py::class_<ar::ConjectureReport>(m, "ConjectureReport")
        .def_readonly("lhs", &ar::ConjectureReport::lhs)
        .def_readonly("rhs", &ar::ConjectureReport::rhs)
        .def_readonly("min_slack", &ar::ConjectureReport::min_slack)
        .def_readonly("escalated", &ar::ConjectureReport::escalated)
        .def_readonly("violated", &ar::ConjectureReport::violated);

    m.def(
        "conjecture_sides",
        [](const std::vector<ar::Vector>& rows, const ar::HyperParams& p) {
            const std::size_t d = rows.empty() ? 1 : rows.front().size();
            ar::Vector flat;
            for (const auto& r : rows) {
                if (r.size() != d) throw ar::LengthMismatch("gradient rows differ in length");
                flat.insert(flat.end(), r.begin(), r.end());
            }
            double cap = 0.0;
            for (double x : flat) cap = std::max(cap, std::abs(x));
            return ar::conjecture_sides(ar::GradSequence(d, flat, cap), p);
        },
        py::arg("gradients"), py::arg("params"), "gradients is a list of T rows of length d");

    m.def(
        "fuzz",
        [](std::size_t trials, std::size_t T_max, std::size_t d, std::uint64_t seed) {
            ar::FuzzConfig cfg;
            cfg.n_trials = trials;
            cfg.T_max = T_max;
            cfg.d = d;
            cfg.seed = seed;
            cfg.grid = ar::default_conjecture_grid();
            ar::FuzzSummary s;
            {
                py::gil_scoped_release release;
                s = ar::conjecture_fuzz(cfg);
            }
            py::dict out;
            out["trials"] = s.trials;
            out["min_slack"] = s.min_slack;
            out["min_relative_slack"] = s.min_relative_slack;
            out["near_misses"] = s.near_misses.size();
            out["violations"] = s.violations.size();
            return out;
        },
        py::arg("trials"), py::arg("T_max") = 64, py::arg("d") = 1, py::arg("seed") = 0);

    m.def("run", [](const std::filesystem::path& config, const std::filesystem::path& out) {
        return static_cast<int>(ar::cmd_run(ar::load_run_config(config), out, std::cerr));
    });
}
