#include "adamregret/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "adamregret/errors.hpp"

namespace adamregret {

namespace {

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double max_pairwise_l2(const std::vector<Vector>& pts) {
    double best = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        const Vector& pa = pts[a];
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            const Vector& pb = pts[b];
            double s = 0.0;
            for (std::size_t i = 0; i < pa.size(); ++i) {
                const double diff = pa[i] - pb[i];
                s += diff * diff;
            }
            best = std::max(best, s);
        }
    }
    return std::sqrt(best);
}

}  // namespace

double error_sum(const Trajectory& traj, const ConvexProblem& problem, const Minimizer& w_star) {
    if (w_star.horizon != traj.horizon()) {
        throw HorizonMismatch("minimizer horizon " + std::to_string(w_star.horizon) +
                              " differs from trajectory horizon " + std::to_string(traj.horizon()));
    }
    CompensatedSum sum;
    for (const auto& rec : traj.records()) {
        sum.add(problem.value(rec.w_before, rec.t));
        sum.add(-problem.value(w_star.w, rec.t));
    }
    return sum.value();
}

BoundReport theorem_bound(const Trajectory& traj, std::span<const double> w_star, double regret) {
    if (traj.empty()) throw InvalidParams("bound evaluation needs a nonempty trajectory");
    const HyperParams& p = traj.params();
    p.validate();
    const std::size_t d = traj.dim();
    if (w_star.size() != d) throw LengthMismatch("w* length differs from trajectory dimension");

    BoundReport r;
    r.T = traj.horizon();
    r.d = d;
    r.regret = regret;

    std::vector<Vector> pts = traj.iterates();
    pts.emplace_back(w_star.begin(), w_star.end());
    for (std::size_t i = 0; i < d; ++i) {
        double lo = pts.front()[i], hi = pts.front()[i];
        for (const auto& w : pts) {
            lo = std::min(lo, w[i]);
            hi = std::max(hi, w[i]);
        }
        r.D_inf = std::max(r.D_inf, hi - lo);
    }
    r.D_2 = max_pairwise_l2(pts);

    Vector col_sq(d, 0.0);
    for (const auto& rec : traj.records()) {
        r.G_inf = std::max(r.G_inf, norm_inf(rec.g));
        r.G_2 = std::max(r.G_2, norm2(rec.g));
        for (std::size_t i = 0; i < d; ++i) col_sq[i] += rec.g[i] * rec.g[i];
    }
    const double Td = static_cast<double>(r.T);
    const auto& vhat_T = traj.records().back().v_hat;
    for (std::size_t i = 0; i < d; ++i) {
        r.sum_grad_norms += std::sqrt(col_sq[i]);
        r.sum_sqrt_T_vhat += std::sqrt(Td * vhat_T[i]);
    }

    const double D2 = r.D_inf * r.D_inf;
    const double lead = D2 / (2.0 * p.eta * (1.0 - p.beta1));
    r.term1 = lead * r.sum_sqrt_T_vhat;
    const double numer2 = static_cast<double>(d) * D2 * r.G_inf;
    const double one_minus_lambda = 1.0 - p.lambda;
    if (one_minus_lambda == 0.0) {
        r.term2 = numer2 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        r.term2 = numer2 / (2.0 * p.eta * (1.0 - p.beta1) * one_minus_lambda * one_minus_lambda);
    }
    r.term3 = p.eta * (1.0 + p.beta1) /
              ((1.0 - p.beta1) * std::sqrt(1.0 - p.beta2) * (1.0 - p.gamma())) * r.sum_grad_norms;
    r.bound = r.term1 + r.term2 + r.term3;
    r.slack = r.bound - r.regret;
    return r;
}

BoundReport theorem_bound(const Trajectory& traj, const ConvexProblem& problem,
                          const Minimizer& w_star) {
    const double regret = error_sum(traj, problem, w_star);
    return theorem_bound(traj, w_star.w, regret);
}

double geometric_sum_closed_form(double lambda, std::size_t T) {
    const double Td = static_cast<double>(T);
    const double lT = std::pow(lambda, Td);
    const double num = (Td - 1.0) * lT * lambda - Td * lT + lambda;
    const double den = (lambda - 1.0) * (lambda - 1.0);
    return num / den;
}

BoundCheck geometric_sum_bound_check(const HyperParams& p, std::size_t T) {
    BoundCheck c;
    for (std::size_t t = 1; t <= T; ++t) {
        const double b = p.beta1_at(t);
        c.lhs += b / (1.0 - b) * std::sqrt(static_cast<double>(t));
    }
    const double oml = 1.0 - p.lambda;
    c.rhs = 1.0 / ((1.0 - p.beta1) * oml * oml);
    return c;
}

bool vhat_bound_check(const Trajectory& traj, double G_inf) {
    for (const auto& rec : traj.records()) {
        for (std::size_t i = 0; i < traj.dim(); ++i) {
            if (std::abs(rec.g[i]) > G_inf) {
                throw PreconditionError("|g| exceeds G_inf at t = " + std::to_string(rec.t) +
                                            ", i = " + std::to_string(i),
                                        rec.t, i);
            }
        }
    }
    const double cap = G_inf * (1.0 + 1e-12);
    for (const auto& rec : traj.records()) {
        for (double vh : rec.v_hat) {
            if (!(std::sqrt(vh) <= cap)) return false;
        }
    }
    return true;
}

RegretSeries average_regret_series(const std::vector<BoundReport>& reports) {
    if (reports.size() < 3) {
        throw InsufficientDataError("average regret series needs at least three horizons, got " +
                                    std::to_string(reports.size()));
    }
    RegretSeries s;
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const auto& r = reports[k];
        if (k > 0 && (r.T <= reports[k - 1].T || r.d != reports[k - 1].d)) {
            throw InvalidParams("reports must share d and have strictly increasing T");
        }
        const double Td = static_cast<double>(r.T);
        s.points.push_back({r.T, r.regret / Td, r.bound / Td});
    }
    const double T_last = static_cast<double>(s.points.back().T);
    std::vector<const SeriesPoint*> fit;
    for (const auto& pt : s.points) {
        if (static_cast<double>(pt.T) >= T_last / 10.0) fit.push_back(&pt);
    }
    if (fit.size() < 2) {
        fit.clear();
        for (const auto& pt : s.points) fit.push_back(&pt);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(fit.size());
    for (const auto* pt : fit) {
        const double x = std::log(static_cast<double>(pt->T));
        const double y = std::log(pt->avg_bound);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double mx = sx / n, my = sy / n;
    s.slope = (sxy - n * mx * my) / (sxx - n * mx * mx);
    s.intercept = my - s.slope * mx;
    return s;
}

void write_bound_report_csv(std::ostream& os, const std::vector<BoundReport>& reports,
                            const std::vector<std::string>& labels) {
    os << "mode,T,d,regret,D_inf,D_2,G_inf,G_2,term1,term2,term3,bound,slack,"
          "sum_sqrt_T_vhat,sum_grad_norms\n";
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const auto& r = reports[k];
        os << (k < labels.size() ? labels[k] : std::string{}) << ',' << r.T << ',' << r.d << ','
           << format_double(r.regret) << ',' << format_double(r.D_inf) << ','
           << format_double(r.D_2) << ',' << format_double(r.G_inf) << ','
           << format_double(r.G_2) << ',' << format_double(r.term1) << ','
           << format_double(r.term2) << ',' << format_double(r.term3) << ','
           << format_double(r.bound) << ',' << format_double(r.slack) << ','
           << format_double(r.sum_sqrt_T_vhat) << ',' << format_double(r.sum_grad_norms) << '\n';
    }
}

void write_bound_report_text(std::ostream& os, const BoundReport& r, const HyperParams& p) {
    os << "horizon T             " << r.T << '\n'
       << "dimension d           " << r.d << '\n'
       << "eta beta1 beta2       " << format_double(p.eta) << ' ' << format_double(p.beta1) << ' '
       << format_double(p.beta2) << '\n'
       << "lambda epsilon gamma  " << format_double(p.lambda) << ' ' << format_double(p.epsilon)
       << ' ' << format_double(p.gamma()) << '\n'
       << "measured D_inf D_2    " << format_double(r.D_inf) << ' ' << format_double(r.D_2) << '\n'
       << "measured G_inf G_2    " << format_double(r.G_inf) << ' ' << format_double(r.G_2) << '\n'
       << "regret R(T)           " << format_double(r.regret) << '\n'
       << "term1 (vhat_T)        " << format_double(r.term1) << '\n'
       << "term2 (lambda decay)  " << format_double(r.term2) << '\n'
       << "term3 (gradient norm) " << format_double(r.term3) << '\n'
       << "bound                 " << format_double(r.bound) << '\n'
       << "slack bound - R(T)    " << format_double(r.slack) << '\n'
       << "bound holds           " << (r.slack >= 0.0 ? "yes" : "NO") << '\n';
}

void write_series_csv(std::ostream& os, const RegretSeries& s) {
    os << "T,avg_regret,avg_bound\n";
    for (const auto& pt : s.points) {
        os << pt.T << ',' << format_double(pt.avg_regret) << ',' << format_double(pt.avg_bound)
           << '\n';
    }
}

}  // namespace adamregret
