#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>

#include "adamregret/core.hpp"
#include "adamregret/trajectory.hpp"

namespace adamregret {

/// Plain gradient descent step w - (eta/2) g. The factor 1/2 is part of the rule.
Vector gd_step(std::span<const double> w, std::span<const double> g, double eta);

struct MomentumState {
    Vector w;
    Vector delta_prev;  // previous weight change, zero before the first step

    static MomentumState fresh(std::span<const double> w0);
};

/// Method of moments: delta = -(eta/2) g + alpha * delta_prev; w += delta.
MomentumState momentum_step(const MomentumState& st, std::span<const double> g, double eta,
                            double alpha);

struct AdamStepResult {
    AdamState state;
    StepRecord record;
};

/// One ADAM iteration from `st` with gradient `g` (evaluated at st.w).
///
/// With t = st.t + 1 and beta1_t = beta1 * lambda^(t-1):
///   m    <- beta1_t m + (1 - beta1_t) g
///   v    <- beta2 v + (1 - beta2) g^2
///   mhat  = m / (1 - beta1^t)        (constant beta1 in the correction)
///   vhat  = v / (1 - beta2^t)
///   w    <- w - (eta / sqrt(t)) mhat / (sqrt(vhat) + epsilon)
///
/// With epsilon == 0 a coordinate with vhat == 0 and mhat == 0 does not move.
/// `objective` is copied into the record as e_t(w(t-1)).
///
/// Throws NumericInputError on a nonfinite gradient, DivisionHazardError when
/// epsilon == 0 and vhat_i == 0 but mhat_i != 0, LengthMismatch, InvalidParams.
AdamStepResult adam_step(const AdamState& st, std::span<const double> g, const HyperParams& p,
                         double objective = 0.0);

/// Objective value and gradient returned by a gradient oracle.
struct Evaluation {
    double value = 0.0;
    Vector grad;
};

/// Pure function of (weights, 1-based time step).
using GradOracle = std::function<Evaluation(std::span<const double> w, std::size_t t)>;

struct RunOptions {
    /// Stop before step t when ||g_t||_2 <= grad_norm_tol. Zero disables the test.
    double grad_norm_tol = 0.0;
};

/// Runs exactly T ADAM steps from w0 (fewer only if the optional gradient-norm
/// stop fires). Errors from adam_step propagate with the failing step attached.
Trajectory adam_run(std::span<const double> w0, const GradOracle& oracle, const HyperParams& p,
                    std::size_t T, RunOptions options = {});

/// Re-executes adam_step on the stored gradients starting from w(0) and
/// reports whether every stored w_after, m_hat and v_hat is reproduced bit for bit.
bool replay_matches(const Trajectory& traj);

enum class OptimizerKind { gd, momentum, adam };

std::string_view to_string(OptimizerKind kind) noexcept;

/// Parses "gd", "momentum" or "adam"; throws ConfigError otherwise.
OptimizerKind parse_optimizer_kind(std::string_view name);

/// Objective values e_t(w(t)) after each of T steps of the chosen optimizer.
/// gd uses p.eta, momentum uses p.eta and p.alpha, adam uses all of p.
Vector training_curve(OptimizerKind kind, std::span<const double> w0, const GradOracle& oracle,
                      const HyperParams& p, std::size_t T);

}  // namespace adamregret
