#include "adamregret/optimizers.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "adamregret/errors.hpp"

namespace adamregret {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) {
        throw LengthMismatch("vector lengths differ (" + std::to_string(a) + " vs " +
                             std::to_string(b) + ")");
    }
}

}  // namespace

Vector gd_step(std::span<const double> w, std::span<const double> g, double eta) {
    require_same_length(w.size(), g.size());
    Vector out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] - (eta / 2.0) * g[i];
    return out;
}

MomentumState MomentumState::fresh(std::span<const double> w0) {
    return MomentumState{Vector(w0.begin(), w0.end()), Vector(w0.size(), 0.0)};
}

MomentumState momentum_step(const MomentumState& st, std::span<const double> g, double eta,
                            double alpha) {
    require_same_length(st.w.size(), g.size());
    require_same_length(st.w.size(), st.delta_prev.size());
    MomentumState next;
    next.w.resize(st.w.size());
    next.delta_prev.resize(st.w.size());
    for (std::size_t i = 0; i < st.w.size(); ++i) {
        const double delta = -(eta / 2.0) * g[i] + alpha * st.delta_prev[i];
        next.w[i] = st.w[i] + delta;
        next.delta_prev[i] = delta;
    }
    return next;
}

AdamStepResult adam_step(const AdamState& st, std::span<const double> g, const HyperParams& p,
                         double objective) {
    p.validate();
    const std::size_t d = st.w.size();
    require_same_length(d, g.size());
    require_same_length(d, st.m.size());
    require_same_length(d, st.v.size());

    const std::size_t t = st.t + 1;
    for (std::size_t i = 0; i < d; ++i) {
        if (!std::isfinite(g[i])) {
            throw NumericInputError("nonfinite gradient component " + std::to_string(i) +
                                        " at step " + std::to_string(t),
                                    t);
        }
    }

    const double b1t = p.beta1_at(t);
    const double td = static_cast<double>(t);
    const double m_corr = 1.0 - std::pow(p.beta1, td);
    const double v_corr = 1.0 - std::pow(p.beta2, td);
    const double step = p.eta / std::sqrt(td);

    AdamStepResult out;
    AdamState& ns = out.state;
    StepRecord& rec = out.record;
    ns.t = t;
    ns.m.resize(d);
    ns.v.resize(d);
    ns.w.resize(d);
    rec.t = t;
    rec.w_before = st.w;
    rec.g.assign(g.begin(), g.end());
    rec.e = objective;
    rec.m_hat.resize(d);
    rec.v_hat.resize(d);

    for (std::size_t i = 0; i < d; ++i) {
        ns.m[i] = b1t * st.m[i] + (1.0 - b1t) * g[i];
        ns.v[i] = p.beta2 * st.v[i] + (1.0 - p.beta2) * g[i] * g[i];
        const double mh = ns.m[i] / m_corr;
        const double vh = ns.v[i] / v_corr;
        rec.m_hat[i] = mh;
        rec.v_hat[i] = vh;

        const double denom = std::sqrt(vh) + p.epsilon;
        double ratio;
        if (denom == 0.0) {
            if (mh != 0.0) {
                throw DivisionHazardError("epsilon = 0 and vhat = 0 with nonzero mhat in coordinate " +
                                              std::to_string(i) + " at step " + std::to_string(t),
                                          t);
            }
            ratio = 0.0;
        } else {
            ratio = mh / denom;
        }
        ns.w[i] = st.w[i] - step * ratio;
    }
    rec.w_after = ns.w;
    return out;
}

Trajectory adam_run(std::span<const double> w0, const GradOracle& oracle, const HyperParams& p,
                    std::size_t T, RunOptions options) {
    if (T == 0) throw InvalidParams("horizon T must be at least 1");
    p.validate();
    Trajectory traj(w0.size(), p);
    AdamState st = AdamState::fresh(w0);
    for (std::size_t t = 1; t <= T; ++t) {
        Evaluation ev = oracle(st.w, t);
        if (ev.grad.size() != st.w.size()) {
            throw LengthMismatch("gradient oracle returned a vector of the wrong length");
        }
        if (options.grad_norm_tol > 0.0 && norm2(ev.grad) <= options.grad_norm_tol) break;
        if (!std::isfinite(ev.value)) {
            throw NumericInputError("nonfinite objective value at step " + std::to_string(t), t);
        }
        auto [next, rec] = adam_step(st, ev.grad, p, ev.value);
        traj.append(std::move(rec));
        st = std::move(next);
    }
    return traj;
}

namespace {

bool same_bits(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
    }
    return true;
}

}  // namespace

bool replay_matches(const Trajectory& traj) {
    if (traj.empty()) return true;
    AdamState st = AdamState::fresh(traj.at(1).w_before);
    for (const auto& rec : traj.records()) {
        if (!same_bits(st.w, rec.w_before)) return false;
        auto [next, replayed] = adam_step(st, rec.g, traj.params(), rec.e);
        if (!same_bits(replayed.m_hat, rec.m_hat) || !same_bits(replayed.v_hat, rec.v_hat) ||
            !same_bits(replayed.w_after, rec.w_after)) {
            return false;
        }
        st = std::move(next);
    }
    return true;
}

std::string_view to_string(OptimizerKind kind) noexcept {
    switch (kind) {
        case OptimizerKind::gd: return "gd";
        case OptimizerKind::momentum: return "momentum";
        case OptimizerKind::adam: return "adam";
    }
    return "unknown";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
    if (name == "gd") return OptimizerKind::gd;
    if (name == "momentum") return OptimizerKind::momentum;
    if (name == "adam") return OptimizerKind::adam;
    throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected gd, momentum or adam)");
}

Vector training_curve(OptimizerKind kind, std::span<const double> w0, const GradOracle& oracle,
                      const HyperParams& p, std::size_t T) {
    Vector curve;
    curve.reserve(T);
    switch (kind) {
        case OptimizerKind::gd: {
            Vector w(w0.begin(), w0.end());
            for (std::size_t t = 1; t <= T; ++t) {
                w = gd_step(w, oracle(w, t).grad, p.eta);
                curve.push_back(oracle(w, t).value);
            }
            break;
        }
        case OptimizerKind::momentum: {
            MomentumState st = MomentumState::fresh(w0);
            for (std::size_t t = 1; t <= T; ++t) {
                st = momentum_step(st, oracle(st.w, t).grad, p.eta, p.alpha);
                curve.push_back(oracle(st.w, t).value);
            }
            break;
        }
        case OptimizerKind::adam: {
            AdamState st = AdamState::fresh(w0);
            for (std::size_t t = 1; t <= T; ++t) {
                st = adam_step(st, oracle(st.w, t).grad, p).state;
                curve.push_back(oracle(st.w, t).value);
            }
            break;
        }
    }
    return curve;
}

}  // namespace adamregret
