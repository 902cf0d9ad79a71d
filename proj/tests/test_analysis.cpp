#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "adamregret/analysis.hpp"
#include "adamregret/errors.hpp"
#include "adamregret/optimizers.hpp"
#include "adamregret/rng.hpp"

using namespace adamregret;

namespace {

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

Trajectory constant_iterate_trajectory(double w, std::size_t T) {
    Trajectory traj(1, HyperParams{});
    for (std::size_t t = 1; t <= T; ++t) {
        StepRecord r;
        r.t = t;
        r.w_before = {w};
        r.g = {w};
        r.e = 0.5 * w * w;
        r.m_hat = {w};
        r.v_hat = {w * w};
        r.w_after = {w};
        traj.append(r);
    }
    return traj;
}

}  // namespace

TEST(ErrorSum, HandSumOnConstantIterates) {
    const auto p = ConvexProblem::quadratic(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Zero(1));
    const Minimizer w_star = minimizer_oracle(p, 3);
    EXPECT_DOUBLE_EQ(error_sum(constant_iterate_trajectory(1.0, 3), p, w_star), 1.5);
    EXPECT_EQ(error_sum(constant_iterate_trajectory(0.0, 3), p, w_star), 0.0);
    EXPECT_THROW(error_sum(constant_iterate_trajectory(1.0, 4), p, w_star), HorizonMismatch);
}

TEST(ErrorSum, NonnegativeOnAdamRuns) {
    for (const char* text : {"kind = quadratic\nd = 3\nseed = 1\n",
                             "kind = logistic\nd = 4\nseed = 2\nn_samples = 60\n",
                             "kind = noisy-quadratic\nd = 2\nseed = 3\n"}) {
        const auto p = build_problem(parse_problem_spec(std::string(text)));
        HyperParams hp;
        hp.eta = 0.05;
        const std::size_t T = 300;
        const Trajectory traj = adam_run(Vector(p.dim(), 0.5), p.oracle(), hp, T);
        const Minimizer w_star = minimizer_oracle(p, T);
        double emax = 0.0;
        for (const auto& r : traj.records()) emax = std::max(emax, std::abs(r.e));
        EXPECT_GE(error_sum(traj, p, w_star), -1e-9 * T * std::max(1.0, emax)) << text;
    }
}

TEST(TheoremBound, SingleStepByHand) {
    HyperParams p;
    p.eta = 1.0;
    p.beta1 = 0.9;
    p.beta2 = 0.999;
    p.lambda = 0.999;
    p.epsilon = 0.0;
    Trajectory traj(1, p);
    traj.append(adam_step(AdamState::fresh(Vector{0.0}), Vector{1.0}, p).record);
    ASSERT_EQ(traj.at(1).w_after[0], -1.0);

    const BoundReport r = theorem_bound(traj, Vector{0.0}, 0.25);
    EXPECT_EQ(r.T, 1u);
    EXPECT_EQ(r.d, 1u);
    EXPECT_EQ(r.D_inf, 1.0);
    EXPECT_EQ(r.G_inf, 1.0);
    EXPECT_LE(rel_err(r.term1, 5.0), 1e-12);
    EXPECT_LE(rel_err(r.term2, 5e6), 1e-9);
    // 1.9 / (0.1 sqrt(0.001) (1 - 0.81/sqrt(0.999))), evaluated with mpmath at 40 digits
    EXPECT_LE(rel_err(r.term3, 3169.037784910385049977844), 1e-12);
    EXPECT_EQ(r.bound, r.term1 + r.term2 + r.term3);
    EXPECT_EQ(r.slack, r.bound - 0.25);
}

TEST(TheoremBound, ZeroGradientRun) {
    HyperParams p;
    const Trajectory traj = adam_run(Vector{0.3, 0.3},
                                     [](std::span<const double> w, std::size_t) {
                                         return Evaluation{0.0, Vector(w.size(), 0.0)};
                                     },
                                     p, 20);
    const BoundReport r = theorem_bound(traj, Vector{0.0, 0.0}, 0.0);
    EXPECT_EQ(r.term1, 0.0);
    EXPECT_EQ(r.term3, 0.0);
    EXPECT_EQ(r.regret, 0.0);
    EXPECT_EQ(r.slack, r.term2);
    EXPECT_GE(r.slack, 0.0);
}

TEST(TheoremBound, SlackNonnegativeAndCorollaryEstimates) {
    const auto prob = build_problem(parse_problem_spec(std::string("kind = noisy-quadratic\nd = 3\nseed = 8\n")));
    for (const HyperParams& base : {HyperParams{}}) {
        for (double eta : {0.001, 0.01, 0.1}) {
            HyperParams p = base;
            p.eta = eta;
            const std::size_t T = 500;
            const Trajectory traj = adam_run(Vector(3, 0.0), prob.oracle(), p, T);
            const BoundReport r = theorem_bound(traj, prob, minimizer_oracle(prob, T));
            EXPECT_GE(r.slack, 0.0);
            EXPECT_GE(r.term1, 0.0);
            EXPECT_GE(r.term2, 0.0);
            EXPECT_GE(r.term3, 0.0);
            const double cap = r.d * r.G_inf * std::sqrt(static_cast<double>(T));
            EXPECT_LE(r.sum_grad_norms, cap * (1 + 1e-12));
            EXPECT_LE(r.sum_sqrt_T_vhat, cap * (1 + 1e-12));
            EXPECT_GE(r.D_2, r.D_inf);
            EXPECT_LE(r.G_inf, r.G_2);
        }
    }
}

TEST(TheoremBound, RejectsEmptyTrajectory) {
    EXPECT_THROW(theorem_bound(Trajectory(1, HyperParams{}), Vector{0.0}, 0.0), InvalidParams);
}

TEST(GeometricSum, ClosedFormExamples) {
    EXPECT_DOUBLE_EQ(geometric_sum_closed_form(0.5, 3), 1.0);
    EXPECT_EQ(geometric_sum_closed_form(0.5, 1), 0.0);
    EXPECT_EQ(geometric_sum_closed_form(0.3, 1), 0.0);
}

TEST(GeometricSum, MatchesBruteForce) {
    Rng rng = seeded_rng(2024);
    for (int k = 0; k < 1000; ++k) {
        const double lambda = rng.uniform(0.01, 0.99);
        const std::size_t T = 1 + rng.uniform_int(0, 999);
        long double direct = 0.0L, pw = 1.0L;
        for (std::size_t t = 0; t < T; ++t) {
            direct += static_cast<long double>(t) * pw;
            pw *= lambda;
        }
        const double cf = geometric_sum_closed_form(lambda, T);
        if (T == 1) {
            ASSERT_EQ(cf, 0.0);
        } else {
            ASSERT_LE(rel_err(cf, static_cast<double>(direct)), 1e-10) << lambda << " " << T;
        }
    }
}

TEST(GeometricSumBound, HandExampleAndGrid) {
    HyperParams p;
    p.beta1 = 0.9;
    p.lambda = 0.5;
    BoundCheck c = geometric_sum_bound_check(p, 3);
    EXPECT_LE(rel_err(c.lhs, 10.65993728402173715740436), 1e-12);
    EXPECT_DOUBLE_EQ(c.rhs, 40.0);
    EXPECT_TRUE(c.holds());

    c = geometric_sum_bound_check(p, 1);
    EXPECT_DOUBLE_EQ(c.lhs, 9.0);
    EXPECT_TRUE(c.holds());

    for (double b1 : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        for (double lam : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
            HyperParams q;
            q.beta1 = b1;
            q.beta2 = 0.9999;
            q.lambda = lam;
            for (std::size_t T = 1; T <= 1000; ++T) {
                ASSERT_TRUE(geometric_sum_bound_check(q, T).holds()) << b1 << " " << lam << " " << T;
            }
        }
    }
}

TEST(VhatBound, EqualityForConstantGradient) {
    HyperParams p;
    p.lambda = 1.0;
    const double G = 2.5;
    const Trajectory traj = adam_run(Vector{0.0},
                                     [G](std::span<const double>, std::size_t) {
                                         return Evaluation{0.0, Vector{G}};
                                     },
                                     p, 200);
    for (const auto& r : traj.records()) EXPECT_LE(rel_err(std::sqrt(r.v_hat[0]), G), 1e-12);
    EXPECT_TRUE(vhat_bound_check(traj, G));
    EXPECT_THROW(vhat_bound_check(traj, 2.0), PreconditionError);
}

TEST(VhatBound, ZeroAndRandomTrajectories) {
    EXPECT_TRUE(vhat_bound_check(constant_iterate_trajectory(0.0, 5), 0.0));
    Rng rng = seeded_rng(13);
    for (int k = 0; k < 200; ++k) {
        HyperParams p;
        p.beta2 = rng.uniform(0.82, 0.9999);
        p.lambda = rng.uniform(0.01, 1.0);
        const std::uint64_t s = rng.next_u64();
        const Trajectory traj = adam_run(Vector{0.0, 0.0},
                                         [s](std::span<const double> w, std::size_t t) {
                                             Rng r(derive_seed(s, t));
                                             Evaluation ev;
                                             for (std::size_t i = 0; i < w.size(); ++i) {
                                                 ev.grad.push_back(r.uniform(-1.0, 1.0));
                                             }
                                             return ev;
                                         },
                                         p, 1 + rng.uniform_int(0, 100));
        ASSERT_TRUE(vhat_bound_check(traj, 1.0));
    }
}

TEST(RegretSeries, NeedsThreeReports) {
    BoundReport r;
    r.T = 10;
    r.d = 1;
    r.bound = 1.0;
    EXPECT_THROW(average_regret_series({r}), InsufficientDataError);
    BoundReport r2 = r;
    r2.T = 5;
    BoundReport r3 = r;
    r3.T = 20;
    EXPECT_THROW(average_regret_series({r, r2, r3}), InvalidParams);
}

TEST(RegretSeries, SyntheticSqrtBoundHasSlopeMinusHalf) {
    std::vector<BoundReport> reports;
    for (std::size_t T : {100u, 316u, 1000u, 3162u, 10000u}) {
        BoundReport r;
        r.T = T;
        r.d = 1;
        r.bound = std::sqrt(static_cast<double>(T));
        r.regret = 0.5 * r.bound;
        reports.push_back(r);
    }
    const RegretSeries s = average_regret_series(reports);
    ASSERT_EQ(s.points.size(), 5u);
    EXPECT_NEAR(s.slope, -0.5, 1e-6);
    EXPECT_DOUBLE_EQ(s.points[0].avg_bound, 0.1);
    EXPECT_DOUBLE_EQ(s.points[0].avg_regret, 0.05);
}

TEST(Reports, CsvHasHeaderAndRows) {
    HyperParams p;
    Trajectory traj(1, p);
    traj.append(adam_step(AdamState::fresh(Vector{0.0}), Vector{1.0}, p).record);
    const BoundReport r = theorem_bound(traj, Vector{0.0}, 0.0);
    std::ostringstream os;
    write_bound_report_csv(os, {r, r}, {"epsilon", "no_epsilon"});
    const std::string s = os.str();
    EXPECT_EQ(s.rfind("mode,", 0), 0u);
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
    EXPECT_NE(s.find("\nno_epsilon,1,1,"), std::string::npos);
    std::ostringstream txt;
    write_bound_report_text(txt, r, p);
    EXPECT_NE(txt.str().find("slack"), std::string::npos);
}
