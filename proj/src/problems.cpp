#include "adamregret/problems.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adamregret/errors.hpp"
#include "adamregret/rng.hpp"

namespace adamregret {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::Map<const VectorXd> as_eigen(std::span<const double> w) {
    return {w.data(), static_cast<Eigen::Index>(w.size())};
}

Vector to_vector(const VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

// log(1 + exp(-z)) without overflow.
double softplus_neg(double z) {
    return std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// 1 / (1 + exp(z))
double sigmoid_neg(double z) {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

void check_finite(std::span<const double> w, std::size_t t) {
    for (double x : w) {
        if (!std::isfinite(x)) throw NumericInputError("objective evaluated at a nonfinite point", t);
    }
}

MatrixXd random_spd(Rng& rng, std::size_t d, double mu) {
    MatrixXd B(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) B(r, c) = rng.normal();
    MatrixXd A = B.transpose() * B / static_cast<double>(d);
    A.diagonal().array() += mu;
    // exact symmetry regardless of how the product was accumulated
    return 0.5 * (A + A.transpose());
}

VectorXd random_normal(Rng& rng, std::size_t d) {
    VectorXd v(d);
    for (std::size_t i = 0; i < d; ++i) v(i) = rng.normal();
    return v;
}

struct LogisticEval {
    double value;
    VectorXd grad;
};

LogisticEval logistic_eval(const MatrixXd& X, const VectorXd& y, double mu, const VectorXd& w) {
    const auto n = X.rows();
    const VectorXd z = (X * w).cwiseProduct(y);
    double loss = 0.0;
    VectorXd coeff(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        loss += softplus_neg(z(k));
        coeff(k) = -y(k) * sigmoid_neg(z(k));
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    LogisticEval out;
    out.value = loss * inv_n + 0.5 * mu * w.squaredNorm();
    out.grad = X.transpose() * coeff * inv_n + mu * w;
    return out;
}

MatrixXd logistic_hessian(const MatrixXd& X, const VectorXd& y, double mu, const VectorXd& w) {
    const auto n = X.rows();
    const VectorXd z = (X * w).cwiseProduct(y);
    VectorXd weights(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double s = sigmoid_neg(z(k));
        weights(k) = s * (1.0 - s);
    }
    MatrixXd H = X.transpose() * weights.asDiagonal() * X / static_cast<double>(n);
    H.diagonal().array() += mu;
    return H;
}

}  // namespace

std::string_view to_string(ProblemKind kind) noexcept {
    switch (kind) {
        case ProblemKind::quadratic: return "quadratic";
        case ProblemKind::logistic: return "logistic";
        case ProblemKind::noisy_quadratic: return "noisy-quadratic";
    }
    return "unknown";
}

ProblemKind parse_problem_kind(std::string_view name) {
    if (name == "quadratic") return ProblemKind::quadratic;
    if (name == "logistic") return ProblemKind::logistic;
    if (name == "noisy-quadratic" || name == "noisy_quadratic") return ProblemKind::noisy_quadratic;
    throw ConfigError("unknown problem kind '" + std::string(name) +
                      "' (expected quadratic, logistic or noisy-quadratic)");
}

ConvexProblem ConvexProblem::quadratic(MatrixXd A, VectorXd b) {
    const auto d = A.rows();
    if (d == 0 || A.cols() != d || b.size() != d) {
        throw LengthMismatch("quadratic problem needs a square A and matching b");
    }
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InvalidParams("quadratic Hessian must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(A, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
        throw InvalidParams("quadratic Hessian must be positive semidefinite");
    }
    ConvexProblem p;
    p.kind_ = ProblemKind::quadratic;
    p.d_ = static_cast<std::size_t>(d);
    p.A_ = std::move(A);
    p.b_ = std::move(b);
    return p;
}

ConvexProblem ConvexProblem::logistic(MatrixXd X, VectorXd y, double mu) {
    if (X.rows() == 0 || X.cols() == 0 || y.size() != X.rows()) {
        throw LengthMismatch("logistic problem needs n x d features and n labels");
    }
    for (Eigen::Index k = 0; k < y.size(); ++k) {
        if (y(k) != 1.0 && y(k) != -1.0) throw InvalidParams("logistic labels must be +1 or -1");
    }
    if (!(mu >= 0.0)) throw InvalidParams("logistic regularizer mu must be nonnegative");
    ConvexProblem p;
    p.kind_ = ProblemKind::logistic;
    p.d_ = static_cast<std::size_t>(X.cols());
    p.X_ = std::move(X);
    p.y_ = std::move(y);
    p.mu_ = mu;
    return p;
}

ConvexProblem ConvexProblem::noisy_quadratic(MatrixXd A, VectorXd center, double noise_scale,
                                             std::uint64_t noise_seed) {
    ConvexProblem p = quadratic(std::move(A), std::move(center));
    if (!(noise_scale >= 0.0)) throw InvalidParams("noise_scale must be nonnegative");
    p.kind_ = ProblemKind::noisy_quadratic;
    p.noise_scale_ = noise_scale;
    p.noise_seed_ = noise_seed;
    return p;
}

VectorXd ConvexProblem::center_at(std::size_t t) const {
    if (kind_ != ProblemKind::noisy_quadratic) {
        throw InvalidParams("center_at is only defined for noisy-quadratic problems");
    }
    Rng rng(derive_seed(noise_seed_, t));
    VectorXd c = b_;
    for (std::size_t i = 0; i < d_; ++i) c(i) += noise_scale_ * rng.normal();
    return c;
}

Evaluation ConvexProblem::evaluate(std::span<const double> w, std::size_t t) const {
    if (w.size() != d_) throw LengthMismatch("weight vector length differs from problem dimension");
    check_finite(w, t);
    const auto x = as_eigen(w);
    Evaluation ev;
    switch (kind_) {
        case ProblemKind::quadratic: {
            const VectorXd Ax = A_ * x;
            ev.value = 0.5 * x.dot(Ax) - b_.dot(x);
            ev.grad = to_vector(Ax - b_);
            break;
        }
        case ProblemKind::noisy_quadratic: {
            const VectorXd r = x - center_at(t);
            const VectorXd Ar = A_ * r;
            ev.value = 0.5 * r.dot(Ar);
            ev.grad = to_vector(Ar);
            break;
        }
        case ProblemKind::logistic: {
            auto le = logistic_eval(X_, y_, mu_, x);
            ev.value = le.value;
            ev.grad = to_vector(le.grad);
            break;
        }
    }
    return ev;
}

double ConvexProblem::value(std::span<const double> w, std::size_t t) const {
    return evaluate(w, t).value;
}

GradOracle ConvexProblem::oracle() const {
    return [p = *this](std::span<const double> w, std::size_t t) { return p.evaluate(w, t); };
}

namespace {

// Solves H w = r for symmetric PSD H. LDLT with refinement first; if that
// misses the residual tolerance, a pseudo-inverse solve, and if r has a
// component outside range(H) the quadratic has no minimum.
VectorXd psd_solve(const MatrixXd& H, const VectorXd& r, double tol) {
    Eigen::LDLT<MatrixXd> ldlt(H);
    VectorXd w = ldlt.solve(r);
    for (int it = 0; it < 3; ++it) w += ldlt.solve(r - H * w);
    if (w.allFinite() && (H * w - r).norm() <= tol) return w;

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(H);
    const VectorXd& ev = eig.eigenvalues();
    const MatrixXd& Q = eig.eigenvectors();
    const double cutoff = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    const VectorXd coef = Q.transpose() * r;
    VectorXd z = VectorXd::Zero(coef.size());
    double null_part = 0.0;
    for (Eigen::Index k = 0; k < coef.size(); ++k) {
        if (ev[k] > cutoff) {
            z[k] = coef[k] / ev[k];
        } else {
            null_part += coef[k] * coef[k];
        }
    }
    if (std::sqrt(null_part) > tol) {
        throw UnboundedMinimizerError(
            "quadratic is unbounded below: linear term has a component in the null space of A");
    }
    return Q * z;
}

}  // namespace

Minimizer minimizer_oracle(const ConvexProblem& p, std::size_t T) {
    if (T == 0) throw InvalidParams("horizon T must be at least 1");
    const auto d = static_cast<Eigen::Index>(p.dim());
    const double Td = static_cast<double>(T);
    Minimizer out;
    out.horizon = T;
    VectorXd w(d);

    switch (p.kind()) {
        case ProblemKind::quadratic: {
            const auto& A = p.hessian_matrix();
            const auto& b = p.linear_term();
            out.tolerance = 1e-10 * std::max(1.0, Td * b.norm());
            w = psd_solve(A, b, out.tolerance / Td);
            out.stationarity = Td * (A * w - b).norm();
            break;
        }
        case ProblemKind::noisy_quadratic: {
            const auto& A = p.hessian_matrix();
            VectorXd csum = VectorXd::Zero(d);
            double grad0_sum = 0.0;
            for (std::size_t t = 1; t <= T; ++t) {
                const VectorXd c = p.center_at(t);
                csum += c;
                grad0_sum += (A * c).norm();
            }
            out.tolerance = 1e-10 * std::max(1.0, grad0_sum);
            // sum_t A (w - c_t) = 0  <=>  (T A) w = A sum_t c_t
            const MatrixXd H = Td * A;
            const VectorXd rhs = A * csum;
            w = psd_solve(H, rhs, out.tolerance);
            out.stationarity = (H * w - rhs).norm();
            break;
        }
        case ProblemKind::logistic: {
            const auto& X = p.features();
            const auto& y = p.labels();
            const double mu = p.mu();
            w.setZero();
            auto cur = logistic_eval(X, y, mu, w);
            out.tolerance = 1e-10 * std::max(1.0, Td * cur.grad.norm());
            const double grad_tol = out.tolerance / Td;
            bool converged = cur.grad.norm() <= grad_tol;
            for (int iter = 0; iter < 200 && !converged; ++iter) {
                const MatrixXd H = logistic_hessian(X, y, mu, w);
                Eigen::LDLT<MatrixXd> ldlt(H);
                if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
                    ldlt.vectorD().minCoeff() <= 0.0) {
                    throw UnboundedMinimizerError(
                        "logistic objective has no unique attained minimizer (singular Hessian); add mu > 0");
                }
                const VectorXd step = -ldlt.solve(cur.grad);
                const double slope = cur.grad.dot(step);
                double alpha = 1.0;
                VectorXd trial;
                LogisticEval next;
                for (;;) {
                    trial = w + alpha * step;
                    next = logistic_eval(X, y, mu, trial);
                    if (next.value <= cur.value + 1e-4 * alpha * slope ||
                        next.grad.norm() < cur.grad.norm() || alpha < 1e-12) {
                        break;
                    }
                    alpha *= 0.5;
                }
                w = trial;
                cur = next;
                if (!w.allFinite() || w.norm() > 1e12) {
                    throw UnboundedMinimizerError("logistic Newton iterates diverge; data are separable");
                }
                converged = cur.grad.norm() <= grad_tol;
            }
            if (mu == 0.0) {
                // At an attained unregularized minimizer some sample has margin <= 0;
                // otherwise w separates the data and scaling it up lowers the loss.
                const VectorXd margins = (X * w).cwiseProduct(y);
                if (margins.minCoeff() > 0.0) {
                    throw UnboundedMinimizerError(
                        "logistic data are linearly separable; the minimum is not attained (use mu > 0)");
                }
            }
            out.stationarity = Td * cur.grad.norm();
            if (!converged) {
                throw NumericError("logistic Newton solve did not reach the stationarity tolerance", 0);
            }
            break;
        }
    }
    if (!w.allFinite() || out.stationarity > out.tolerance) {
        throw NumericError("minimizer does not meet the stationarity tolerance (" +
                               format_double(out.stationarity) + " > " +
                               format_double(out.tolerance) + ")",
                           0);
    }
    out.w = to_vector(w);
    return out;
}

double convexity_gap(const ConvexProblem& p, std::span<const double> x, std::span<const double> y,
                     std::size_t t) {
    if (x.size() != y.size()) throw LengthMismatch("convexity_gap points differ in length");
    const Evaluation fx = p.evaluate(x, t);
    const double fy = p.value(y, t);
    double lin = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) lin += fx.grad[i] * (y[i] - x[i]);
    return fy - fx.value - lin;
}

ProblemSpec parse_problem_spec(const KeyValues& kv) {
    kv.reject_unknown({"kind", "d", "seed", "n_samples", "mu", "noise_scale"});
    ProblemSpec spec;
    spec.kind = parse_problem_kind(kv.require_string("kind"));
    spec.d = kv.require_uint("d");
    spec.seed = kv.get_uint("seed", spec.seed);
    spec.n_samples = kv.get_uint("n_samples", spec.n_samples);
    spec.mu = kv.get_double("mu", spec.mu);
    spec.noise_scale = kv.get_double("noise_scale", spec.noise_scale);
    if (spec.d == 0) throw ConfigError(kv.source() + ": d must be positive");
    if (spec.kind == ProblemKind::logistic && spec.n_samples == 0) {
        throw ConfigError(kv.source() + ": n_samples must be positive");
    }
    if (!(spec.mu >= 0.0)) throw ConfigError(kv.source() + ": mu must be nonnegative");
    if (!(spec.noise_scale >= 0.0)) throw ConfigError(kv.source() + ": noise_scale must be nonnegative");
    return spec;
}

ProblemSpec parse_problem_spec(const std::string& text) {
    return parse_problem_spec(KeyValues::parse_string(text, "<problem spec>"));
}

ProblemSpec load_problem_spec(const std::filesystem::path& path) {
    return parse_problem_spec(KeyValues::load(path));
}

ConvexProblem build_problem(const ProblemSpec& spec) {
    Rng rng(spec.seed);
    const std::size_t d = spec.d;
    switch (spec.kind) {
        case ProblemKind::quadratic: {
            MatrixXd A = random_spd(rng, d, spec.mu);
            VectorXd b = random_normal(rng, d);
            return ConvexProblem::quadratic(std::move(A), std::move(b));
        }
        case ProblemKind::noisy_quadratic: {
            MatrixXd A = random_spd(rng, d, spec.mu);
            VectorXd center = random_normal(rng, d);
            return ConvexProblem::noisy_quadratic(std::move(A), std::move(center), spec.noise_scale,
                                                  derive_seed(spec.seed, 1));
        }
        case ProblemKind::logistic: {
            const VectorXd w_true = random_normal(rng, d);
            MatrixXd X(spec.n_samples, d);
            for (std::size_t k = 0; k < spec.n_samples; ++k)
                for (std::size_t i = 0; i < d; ++i) X(k, i) = rng.normal();
            VectorXd y(spec.n_samples);
            for (std::size_t k = 0; k < spec.n_samples; ++k) {
                const double p_pos = 1.0 - sigmoid_neg(X.row(k).dot(w_true));
                y(k) = rng.uniform01() < p_pos ? 1.0 : -1.0;
            }
            return ConvexProblem::logistic(std::move(X), std::move(y), spec.mu);
        }
    }
    throw ConfigError("unknown problem kind");
}

}  // namespace adamregret
