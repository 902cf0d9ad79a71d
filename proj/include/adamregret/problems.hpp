#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "adamregret/core.hpp"
#include "adamregret/keyvalue.hpp"
#include "adamregret/optimizers.hpp"

namespace adamregret {

enum class ProblemKind { quadratic, logistic, noisy_quadratic };

std::string_view to_string(ProblemKind kind) noexcept;
ProblemKind parse_problem_kind(std::string_view name);

/// Convex differentiable objective family e_t : R^d -> R.
///
///   quadratic        e_t(w) = 1/2 w'Aw - b'w                      (same for every t)
///   logistic         e_t(w) = mean_k log(1 + exp(-y_k x_k'w)) + mu/2 |w|^2
///   noisy_quadratic  e_t(w) = 1/2 (w - c_t)'A(w - c_t),  c_t = center + noise_scale z_t
///
/// z_t ~ N(0, I) is drawn from the stream derive_seed(noise_seed, t), so c_t is a
/// pure function of (noise_seed, t). Instances are immutable.
class ConvexProblem {
public:
    /// A must be symmetric positive semidefinite; throws InvalidParams otherwise.
    static ConvexProblem quadratic(Eigen::MatrixXd A, Eigen::VectorXd b);
    /// X is n x d, labels must be +1 or -1, mu >= 0.
    static ConvexProblem logistic(Eigen::MatrixXd X, Eigen::VectorXd y, double mu);
    static ConvexProblem noisy_quadratic(Eigen::MatrixXd A, Eigen::VectorXd center,
                                         double noise_scale, std::uint64_t noise_seed);

    ProblemKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return d_; }

    /// e_t(w) and its gradient. Throws NumericInputError on nonfinite w.
    Evaluation evaluate(std::span<const double> w, std::size_t t) const;

    /// Just the value of e_t(w).
    double value(std::span<const double> w, std::size_t t) const;

    /// c_t of the noisy family. Throws InvalidParams for the other kinds.
    Eigen::VectorXd center_at(std::size_t t) const;

    /// Adapter for adam_run and training_curve. Holds a copy of the problem.
    GradOracle oracle() const;

    const Eigen::MatrixXd& hessian_matrix() const noexcept { return A_; }
    const Eigen::VectorXd& linear_term() const noexcept { return b_; }
    const Eigen::MatrixXd& features() const noexcept { return X_; }
    const Eigen::VectorXd& labels() const noexcept { return y_; }
    double mu() const noexcept { return mu_; }
    double noise_scale() const noexcept { return noise_scale_; }

private:
    ConvexProblem() = default;

    ProblemKind kind_ = ProblemKind::quadratic;
    std::size_t d_ = 0;
    Eigen::MatrixXd A_;
    Eigen::VectorXd b_;  // linear term (quadratic) or center (noisy)
    Eigen::MatrixXd X_;
    Eigen::VectorXd y_;
    double mu_ = 0.0;
    double noise_scale_ = 0.0;
    std::uint64_t noise_seed_ = 0;
};

/// Result of minimizer_oracle: argmin over R^d of sum_{t=1..T} e_t.
struct Minimizer {
    Vector w;
    std::size_t horizon = 0;
    double stationarity = 0.0;  // |grad sum_t e_t(w)|_2 as computed by the oracle
    double tolerance = 0.0;     // 1e-10 * max(1, sum_t |grad e_t(0)|_2)
};

/// Closed-form linear solve for the quadratic families, damped Newton for
/// logistic. Throws UnboundedMinimizerError when the infimum is not attained
/// (only possible for unregularized logistic data), NumericError if the
/// stationarity tolerance cannot be met.
Minimizer minimizer_oracle(const ConvexProblem& p, std::size_t T);

/// f(y) - f(x) - grad f(x)'(y - x) for f = e_t. Nonnegative for convex f.
double convexity_gap(const ConvexProblem& p, std::span<const double> x, std::span<const double> y,
                     std::size_t t);

/// Problem spec file contents.
///
///   kind        = quadratic | logistic | noisy-quadratic     (required)
///   d           = dimension                                  (required)
///   seed        = 64-bit seed for all synthetic data         (default 0)
///   n_samples   = logistic sample count                      (default 200)
///   mu          = ridge / diagonal shift                     (default 1e-4)
///   noise_scale = noisy-quadratic center perturbation scale  (default 1)
struct ProblemSpec {
    ProblemKind kind = ProblemKind::quadratic;
    std::size_t d = 1;
    std::uint64_t seed = 0;
    std::size_t n_samples = 200;
    double mu = 1e-4;
    double noise_scale = 1.0;

    bool operator==(const ProblemSpec&) const = default;
};

ProblemSpec parse_problem_spec(const KeyValues& kv);
ProblemSpec parse_problem_spec(const std::string& text);
ProblemSpec load_problem_spec(const std::filesystem::path& path);

/// Synthetic instance fully determined by the spec:
///   quadratic        A = B'B/d + mu I (B standard normal), b standard normal
///   logistic         X standard normal, w_true ~ N(0, I) drawn first, y_k = +1 w.p. sigmoid(x_k'w_true)
///   noisy-quadratic  A as above, center standard normal, noise seed derived from seed
ConvexProblem build_problem(const ProblemSpec& spec);

}  // namespace adamregret
