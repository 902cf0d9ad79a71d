#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace adamregret {

using Vector = std::vector<double>;

/// Scalar knobs of the ADAM iteration plus the momentum decay used by the
/// method of moments.
///
/// Admissible ranges: eta > 0; beta1, beta2, alpha in (0, 1); lambda in (0, 1];
/// epsilon >= 0; and gamma = beta1^2 / sqrt(beta2) < 1. lambda = 1 (no decay of
/// beta1) is accepted by the optimizer and the moment analysis; the regret bound
/// is infinite there.
struct HyperParams {
    double eta = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double lambda = 0.999;
    double epsilon = 1e-8;
    double alpha = 0.9;

    double gamma() const noexcept;

    /// beta1 * lambda^(t-1) for t >= 1.
    double beta1_at(std::size_t t) const noexcept;

    /// Throws InvalidParams naming the first violated constraint.
    void validate() const;

    bool operator==(const HyperParams&) const = default;
};

/// Mutable ADAM state: time stamp, both moment vectors and the weights.
struct AdamState {
    std::size_t t = 0;
    Vector m;
    Vector v;
    Vector w;

    /// t = 0, m = v = 0.
    static AdamState fresh(std::span<const double> w0);

    std::size_t dim() const noexcept { return w.size(); }
};

/// Everything observed during step t of an ADAM run.
struct StepRecord {
    std::size_t t = 0;
    Vector w_before;  // w(t-1), the point where g and e were evaluated
    Vector g;
    double e = 0.0;
    Vector m_hat;
    Vector v_hat;
    Vector w_after;  // w(t)

    bool operator==(const StepRecord&) const = default;
};

/// T x d matrix of gradients with a declared cap G_inf on |g_{t,i}|.
/// Rows are time steps (row 0 is t = 1).
class GradSequence {
public:
    /// `g` is row-major with g.size() a multiple of d. Throws PreconditionError
    /// if an entry exceeds the cap or is nonfinite.
    GradSequence(std::size_t d, Vector g, double g_inf_cap);

    std::size_t dim() const noexcept { return d_; }
    std::size_t horizon() const noexcept { return d_ == 0 ? 0 : g_.size() / d_; }
    double cap() const noexcept { return cap_; }

    /// Gradient at 1-based step t, coordinate i.
    double at(std::size_t t, std::size_t i) const { return g_[(t - 1) * d_ + i]; }
    std::span<const double> row(std::size_t t) const {
        return {g_.data() + (t - 1) * d_, d_};
    }
    const Vector& data() const noexcept { return g_; }

private:
    std::size_t d_;
    Vector g_;
    double cap_;
};

/// Shortest round-trippable decimal with at least 17 significant digits,
/// locale independent ("%.17g" semantics).
std::string format_double(double x);

double norm2(std::span<const double> x) noexcept;
double norm_inf(std::span<const double> x) noexcept;

}  // namespace adamregret
