#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "adamregret/core.hpp"
#include "adamregret/problems.hpp"
#include "adamregret/trajectory.hpp"

namespace adamregret {

/// R(T) = sum_t e_t(w_t) - e_t(w*), with w_t the point where g_t was taken
/// (w_before of record t). Throws HorizonMismatch if the minimizer was computed
/// for another T.
double error_sum(const Trajectory& traj, const ConvexProblem& problem, const Minimizer& w_star);

/// Regret bound terms for one run, with the constants measured from the run.
///
///   term1 = D_inf^2 / (2 eta (1-beta1)) * sum_i sqrt(T vhat_{T,i})
///   term2 = d D_inf^2 G_inf / (2 eta (1-beta1) (1-lambda)^2)
///   term3 = eta (1+beta1) / ((1-beta1) sqrt(1-beta2) (1-gamma)) * sum_i |g_{1:T,i}|_2
struct BoundReport {
    std::size_t T = 0;
    std::size_t d = 0;
    double regret = 0.0;
    double D_inf = 0.0;  // max pairwise l_inf distance over w_0..w_T and w*
    double D_2 = 0.0;    // same in l_2
    double G_inf = 0.0;  // max_t |g_t|_inf
    double G_2 = 0.0;    // max_t |g_t|_2
    double term1 = 0.0;
    double term2 = 0.0;
    double term3 = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    double sum_sqrt_T_vhat = 0.0;  // sum_i sqrt(T vhat_{T,i})
    double sum_grad_norms = 0.0;   // sum_i |g_{1:T,i}|_2
};

/// Fills every BoundReport field from the trajectory, w* and a precomputed regret.
/// Terms use proof-side semantics (no epsilon appears in them). Throws
/// InvalidParams on an empty trajectory or gamma >= 1.
BoundReport theorem_bound(const Trajectory& traj, std::span<const double> w_star, double regret);

/// error_sum followed by theorem_bound.
BoundReport theorem_bound(const Trajectory& traj, const ConvexProblem& problem,
                          const Minimizer& w_star);

/// sum_{t=0}^{T-1} t lambda^t via ((T-1) lambda^(T+1) - T lambda^T + lambda) / (lambda-1)^2.
double geometric_sum_closed_form(double lambda, std::size_t T);

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const noexcept { return lhs <= rhs; }
};

/// lhs = sum_{t=1}^T beta1_t/(1-beta1_t) sqrt(t), rhs = 1/((1-beta1)(1-lambda)^2).
BoundCheck geometric_sum_bound_check(const HyperParams& p, std::size_t T);

/// True iff sqrt(vhat_{t,i}) <= G_inf (1 + 1e-12) on every record. Throws
/// PreconditionError with the offending (t, i) if some |g_{t,i}| > G_inf.
bool vhat_bound_check(const Trajectory& traj, double G_inf);

struct SeriesPoint {
    std::size_t T = 0;
    double avg_regret = 0.0;  // R(T)/T
    double avg_bound = 0.0;   // bound(T)/T
};

struct RegretSeries {
    std::vector<SeriesPoint> points;
    /// Least-squares slope of log(bound/T) against log T over the points with
    /// T >= T_max / 10 (all points if that leaves fewer than two).
    double slope = 0.0;
    double intercept = 0.0;
};

/// Throws InsufficientDataError for fewer than three reports, InvalidParams if
/// horizons are not strictly increasing or dimensions differ.
RegretSeries average_regret_series(const std::vector<BoundReport>& reports);

void write_bound_report_csv(std::ostream& os, const std::vector<BoundReport>& reports,
                            const std::vector<std::string>& labels);
void write_bound_report_text(std::ostream& os, const BoundReport& r, const HyperParams& p);
void write_series_csv(std::ostream& os, const RegretSeries& s);

}  // namespace adamregret
