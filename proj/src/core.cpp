#include "adamregret/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "adamregret/errors.hpp"

namespace adamregret {

double HyperParams::gamma() const noexcept {
    return beta1 * beta1 / std::sqrt(beta2);
}

double HyperParams::beta1_at(std::size_t t) const noexcept {
    return beta1 * std::pow(lambda, static_cast<double>(t) - 1.0);
}

void HyperParams::validate() const {
    auto fail = [](const std::string& msg) { throw InvalidParams(msg); };
    if (!(eta > 0.0) || !std::isfinite(eta)) fail("eta must be a positive finite number");
    if (!(beta1 > 0.0 && beta1 < 1.0)) fail("beta1 must lie in (0, 1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) fail("beta2 must lie in (0, 1)");
    if (!(lambda > 0.0 && lambda <= 1.0)) fail("lambda must lie in (0, 1]");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail("epsilon must be a nonnegative finite number");
    if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1)");
    if (!(gamma() < 1.0)) {
        std::ostringstream os;
        os << "hypothesis gamma = beta1^2/sqrt(beta2) < 1 violated (gamma = "
           << format_double(gamma()) << ")";
        fail(os.str());
    }
}

AdamState AdamState::fresh(std::span<const double> w0) {
    AdamState st;
    st.t = 0;
    st.w.assign(w0.begin(), w0.end());
    st.m.assign(w0.size(), 0.0);
    st.v.assign(w0.size(), 0.0);
    return st;
}

GradSequence::GradSequence(std::size_t d, Vector g, double g_inf_cap)
    : d_(d), g_(std::move(g)), cap_(g_inf_cap) {
    if (d_ == 0) throw LengthMismatch("gradient sequence dimension must be positive");
    if (g_.size() % d_ != 0) throw LengthMismatch("gradient matrix size is not a multiple of d");
    if (!(cap_ > 0.0)) throw PreconditionError("G_inf cap must be positive", 0, 0);
    for (std::size_t k = 0; k < g_.size(); ++k) {
        if (!std::isfinite(g_[k]) || std::abs(g_[k]) > cap_) {
            throw PreconditionError("gradient entry exceeds the declared G_inf cap",
                                    k / d_ + 1, k % d_);
        }
    }
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double norm2(std::span<const double> x) noexcept {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double norm_inf(std::span<const double> x) noexcept {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

}  // namespace adamregret
