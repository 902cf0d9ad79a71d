#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "adamregret/errors.hpp"
#include "adamregret/problems.hpp"
#include "adamregret/rng.hpp"

using namespace adamregret;

namespace {

ConvexProblem identity_quadratic(std::size_t d, Eigen::VectorXd b) {
    return ConvexProblem::quadratic(Eigen::MatrixXd::Identity(d, d), std::move(b));
}

std::vector<ConvexProblem> corpus() {
    std::vector<ConvexProblem> out;
    for (const char* text : {"kind = quadratic\nd = 4\nseed = 3\n",
                             "kind = logistic\nd = 5\nseed = 4\nn_samples = 50\n",
                             "kind = noisy-quadratic\nd = 3\nseed = 5\nnoise_scale = 0.5\n"}) {
        out.push_back(build_problem(parse_problem_spec(std::string(text))));
    }
    return out;
}

Vector random_point(Rng& rng, std::size_t d, double r) {
    Vector w(d);
    for (auto& x : w) x = rng.uniform(-r, r);
    return w;
}

}  // namespace

TEST(Evaluate, QuadraticByHand) {
    const auto p = identity_quadratic(2, Eigen::VectorXd::Zero(2));
    const Evaluation ev = p.evaluate(Vector{3.0, 4.0}, 1);
    EXPECT_DOUBLE_EQ(ev.value, 12.5);
    EXPECT_EQ(ev.grad, (Vector{3.0, 4.0}));
}

TEST(Evaluate, LogisticSingleSampleByHand) {
    Eigen::MatrixXd X(1, 1);
    X << 1.0;
    Eigen::VectorXd y(1);
    y << 1.0;
    const auto p = ConvexProblem::logistic(X, y, 0.0);
    const Evaluation ev = p.evaluate(Vector{0.0}, 1);
    EXPECT_NEAR(ev.value, std::log(2.0), 1e-15);
    EXPECT_NEAR(ev.grad[0], -0.5, 1e-15);
}

TEST(Evaluate, LogisticLargeMarginsStayFinite) {
    Eigen::MatrixXd X(2, 1);
    X << 1.0, -1.0;
    Eigen::VectorXd y(2);
    y << 1.0, 1.0;
    const auto p = ConvexProblem::logistic(X, y, 0.0);
    const Evaluation ev = p.evaluate(Vector{800.0}, 1);
    EXPECT_TRUE(std::isfinite(ev.value));
    EXPECT_NEAR(ev.value, 400.0, 1e-9);
    EXPECT_NEAR(ev.grad[0], 0.5, 1e-12);
}

TEST(Evaluate, RejectsBadInput) {
    const auto p = identity_quadratic(2, Eigen::VectorXd::Zero(2));
    EXPECT_THROW(p.evaluate(Vector{1.0}, 1), LengthMismatch);
    EXPECT_THROW(p.evaluate(Vector{1.0, std::nan("")}, 1), NumericInputError);
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 0.0, 0.0, -1.0;
    EXPECT_THROW(ConvexProblem::quadratic(A, Eigen::VectorXd::Zero(2)), InvalidParams);
    Eigen::MatrixXd X(1, 1);
    X << 1.0;
    Eigen::VectorXd y(1);
    y << 0.5;
    EXPECT_THROW(ConvexProblem::logistic(X, y, 0.0), InvalidParams);
}

TEST(Evaluate, NoisyQuadraticCentersArePureFunctionsOfT) {
    const auto p = ConvexProblem::noisy_quadratic(Eigen::MatrixXd::Identity(2, 2),
                                                  Eigen::VectorXd::Zero(2), 1.0, 17);
    EXPECT_EQ(p.center_at(3), p.center_at(3));
    EXPECT_NE(p.center_at(3), p.center_at(4));
    const Eigen::VectorXd c = p.center_at(3);
    const Evaluation ev = p.evaluate(Vector{c[0], c[1]}, 3);
    EXPECT_EQ(ev.value, 0.0);
    EXPECT_THROW(identity_quadratic(1, Eigen::VectorXd::Zero(1)).center_at(1), InvalidParams);
}

TEST(Evaluate, GradientsMatchCentralDifferences) {
    Rng rng = seeded_rng(31);
    const double h = 1e-6;
    for (const auto& p : corpus()) {
        const std::size_t d = p.dim();
        for (int k = 0; k < 100; ++k) {
            const Vector w = random_point(rng, d, 2.0);
            const std::size_t t = 1 + rng.uniform_int(0, 50);
            const Vector g = p.evaluate(w, t).grad;
            Vector fd(d);
            for (std::size_t i = 0; i < d; ++i) {
                Vector wp = w, wm = w;
                wp[i] += h;
                wm[i] -= h;
                fd[i] = (p.value(wp, t) - p.value(wm, t)) / (2 * h);
            }
            double diff = 0.0;
            for (std::size_t i = 0; i < d; ++i) diff += (g[i] - fd[i]) * (g[i] - fd[i]);
            ASSERT_LE(std::sqrt(diff), 1e-5 * std::max(1.0, norm2(g)))
                << to_string(p.kind()) << " k=" << k;
        }
    }
}

TEST(Minimizer, QuadraticClosedForm) {
    Eigen::VectorXd b(2);
    b << 1.0, 2.0;
    const auto p = identity_quadratic(2, b);
    for (std::size_t T : {1u, 7u, 1000u}) {
        const Minimizer m = minimizer_oracle(p, T);
        EXPECT_NEAR(m.w[0], 1.0, 1e-14);
        EXPECT_NEAR(m.w[1], 2.0, 1e-14);
        EXPECT_EQ(m.horizon, T);
        EXPECT_LE(m.stationarity, m.tolerance);
    }
}

TEST(Minimizer, NoisyQuadraticIdentityIsMeanOfCenters) {
    const auto p = ConvexProblem::noisy_quadratic(Eigen::MatrixXd::Identity(3, 3),
                                                  Eigen::VectorXd::Ones(3), 0.7, 99);
    const std::size_t T = 250;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    for (std::size_t t = 1; t <= T; ++t) mean += p.center_at(t);
    mean /= static_cast<double>(T);
    const Minimizer m = minimizer_oracle(p, T);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(m.w[i], mean[i], 1e-13);
}

TEST(Minimizer, StationarityCheckedIndependently) {
    for (const auto& p : corpus()) {
        const std::size_t T = 40;
        const Minimizer m = minimizer_oracle(p, T);
        Vector sum(p.dim(), 0.0);
        for (std::size_t t = 1; t <= T; ++t) {
            const Vector g = p.evaluate(m.w, t).grad;
            for (std::size_t i = 0; i < g.size(); ++i) sum[i] += g[i];
        }
        EXPECT_LE(norm2(sum), m.tolerance) << to_string(p.kind());
        EXPECT_LE(m.tolerance, 1e-10 * std::max(1.0, m.tolerance * 1e10));
    }
}

TEST(Minimizer, SeparableLogisticIsUnbounded) {
    Eigen::MatrixXd X(4, 1);
    X << 1.0, 2.0, -1.0, -3.0;
    Eigen::VectorXd y(4);
    y << 1.0, 1.0, -1.0, -1.0;
    EXPECT_THROW(minimizer_oracle(ConvexProblem::logistic(X, y, 0.0), 10), UnboundedMinimizerError);
    // the same data with a ridge term has an attained minimum
    const Minimizer m = minimizer_oracle(ConvexProblem::logistic(X, y, 1e-4), 10);
    EXPECT_GT(m.w[0], 0.0);
    EXPECT_LE(m.stationarity, m.tolerance);
}

TEST(Minimizer, SingularQuadraticWithoutMinimumIsUnbounded) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 1.0;
    Eigen::VectorXd b(2);
    b << 0.0, 1.0;
    EXPECT_THROW(minimizer_oracle(ConvexProblem::quadratic(A, b), 5), UnboundedMinimizerError);
}

TEST(ConvexityGap, ExamplesAndSweep) {
    const auto q = identity_quadratic(1, Eigen::VectorXd::Zero(1));
    EXPECT_DOUBLE_EQ(convexity_gap(q, Vector{0.0}, Vector{1.0}, 1), 0.5);
    Rng rng = seeded_rng(64);
    for (const auto& p : corpus()) {
        const Vector x = random_point(rng, p.dim(), 1.0);
        EXPECT_EQ(convexity_gap(p, x, x, 2), 0.0);
        for (int k = 0; k < 10000; ++k) {
            const Vector a = random_point(rng, p.dim(), 3.0);
            const Vector b = random_point(rng, p.dim(), 3.0);
            ASSERT_GE(convexity_gap(p, a, b, 1 + rng.uniform_int(0, 20)), -1e-12);
        }
    }
}

TEST(ProblemSpec, ParseDefaultsAndErrors) {
    const ProblemSpec s = parse_problem_spec(std::string("kind = logistic\nd = 10\nseed = 1\n"));
    EXPECT_EQ(s.kind, ProblemKind::logistic);
    EXPECT_EQ(s.d, 10u);
    EXPECT_EQ(s.seed, 1u);
    EXPECT_EQ(s.n_samples, 200u);
    EXPECT_EQ(s.mu, 1e-4);
    EXPECT_THROW(parse_problem_spec(std::string("kind = cubic\nd = 1\n")), ConfigError);
    EXPECT_THROW(parse_problem_spec(std::string("kind = quadratic\n")), ConfigError);
    EXPECT_THROW(parse_problem_spec(std::string("kind = quadratic\nd = 2\ncolour = red\n")), ConfigError);
    EXPECT_THROW(parse_problem_spec(std::string("kind = quadratic\nd = 0\n")), ConfigError);
}

TEST(ProblemSpec, BuildIsDeterministic) {
    const ProblemSpec s = parse_problem_spec(std::string("kind = logistic\nd = 10\nseed = 1\n"));
    const ConvexProblem a = build_problem(s);
    const ConvexProblem b = build_problem(s);
    EXPECT_EQ(a.features(), b.features());
    EXPECT_EQ(a.labels(), b.labels());
    EXPECT_EQ(a.features().rows(), 200);
    EXPECT_EQ(a.features().cols(), 10);
    for (int k = 0; k < a.labels().size(); ++k) {
        EXPECT_TRUE(a.labels()[k] == 1.0 || a.labels()[k] == -1.0);
    }
    ProblemSpec other = s;
    other.seed = 2;
    EXPECT_NE(build_problem(other).features(), a.features());
}
