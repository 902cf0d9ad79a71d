#include "adamregret/conjecture.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "adamregret/errors.hpp"
#include "adamregret/keyvalue.hpp"
#include "adamregret/rng.hpp"

namespace adamregret {

namespace {

namespace mp = boost::multiprecision;
using Extended = mp::number<mp::cpp_bin_float<192, mp::digit_base_2>, mp::et_off>;

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class Real>
struct Sides {
    std::vector<Real> lhs;
    std::vector<Real> rhs;
};

template <class Real>
Sides<Real> moment_sides(const GradSequence& seq, const HyperParams& p) {
    using std::sqrt;
    const std::size_t d = seq.dim();
    const std::size_t T = seq.horizon();
    const Real one(1);
    const Real b1(p.beta1), b2(p.beta2), lam(p.lambda);

    std::vector<Real> m(d, Real(0)), v(d, Real(0)), sq(d, Real(0));
    Sides<Real> s;
    s.lhs.assign(d, Real(0));
    s.rhs.assign(d, Real(0));
    std::vector<bool> unbounded(d, false);

    Real b1_pow(1), b2_pow(1), lam_pow(1);  // lam_pow = lambda^(t-1)
    for (std::size_t t = 1; t <= T; ++t) {
        b1_pow *= b1;
        b2_pow *= b2;
        const Real b1t = b1 * lam_pow;
        const Real m_corr = one - b1_pow;
        const Real v_corr = one - b2_pow;
        const Real tr(static_cast<double>(t));
        for (std::size_t i = 0; i < d; ++i) {
            const Real g(seq.at(t, i));
            m[i] = b1t * m[i] + (one - b1t) * g;
            v[i] = b2 * v[i] + (one - b2) * g * g;
            sq[i] += g * g;
            const Real mh = m[i] / m_corr;
            const Real vh = v[i] / v_corr;
            if (vh > Real(0)) {
                s.lhs[i] += mh * mh / sqrt(tr * vh);
            } else if (mh != Real(0)) {
                unbounded[i] = true;
            }
        }
        lam_pow *= lam;
    }
    const Real gamma = b1 * b1 / sqrt(b2);
    const Real coef = Real(2) / ((one - gamma) * sqrt(one - b2));
    for (std::size_t i = 0; i < d; ++i) {
        s.rhs[i] = coef * sqrt(sq[i]);
        if (unbounded[i]) s.lhs[i] = Real(kInf);
    }
    return s;
}

template <class Real>
ConjectureReport make_report(const Sides<Real>& s) {
    ConjectureReport r;
    const std::size_t d = s.lhs.size();
    r.lhs.resize(d);
    r.rhs.resize(d);
    Real best(kInf);
    for (std::size_t i = 0; i < d; ++i) {
        r.lhs[i] = static_cast<double>(s.lhs[i]);
        r.rhs[i] = static_cast<double>(s.rhs[i]);
        const Real slack = s.rhs[i] - s.lhs[i];
        if (i == 0 || slack < best) {
            best = slack;
            r.argmin_coordinate = i;
        }
    }
    r.min_slack = static_cast<double>(best);
    r.violated = best < Real(0);
    return r;
}

bool is_near_miss(const ConjectureReport& r) {
    for (std::size_t i = 0; i < r.lhs.size(); ++i) {
        if (r.rhs[i] - r.lhs[i] < kNearMissThreshold * r.rhs[i]) return true;
    }
    return false;
}

double relative_slack(const ConjectureReport& r, double* abs_slack) {
    double rel = kInf;
    double abs = kInf;
    for (std::size_t i = 0; i < r.lhs.size(); ++i) {
        const double s = r.rhs[i] - r.lhs[i];
        abs = std::min(abs, s);
        if (r.rhs[i] > 0.0) {
            rel = std::min(rel, s / r.rhs[i]);
        } else if (r.lhs[i] > 0.0) {
            rel = -kInf;
        }
    }
    if (abs_slack) *abs_slack = abs;
    return rel;
}

// Gradient generators. Every value lies in [-G, G].
Vector gen_uniform(Rng& rng, std::size_t n, double G) {
    Vector g(n);
    for (auto& x : g) x = rng.uniform(-G, G);
    return g;
}

Vector gen_gaussian_clipped(Rng& rng, std::size_t n, double G) {
    const double sigma = G * rng.uniform(0.1, 1.0);
    Vector g(n);
    for (auto& x : g) x = std::clamp(sigma * rng.normal(), -G, G);
    return g;
}

// Runs of exact zeros interleaved with runs of uniform values, per coordinate.
Vector gen_sparse_runs(Rng& rng, std::size_t T, std::size_t d, double G) {
    Vector g(T * d, 0.0);
    const double p_switch = rng.uniform(0.05, 0.5);
    for (std::size_t i = 0; i < d; ++i) {
        bool zero_run = rng.uniform01() < 0.5;
        for (std::size_t t = 0; t < T; ++t) {
            if (rng.uniform01() < p_switch) zero_run = !zero_run;
            g[t * d + i] = zero_run ? 0.0 : rng.uniform(-G, G);
        }
    }
    return g;
}

// Long run of tiny (or zero) gradients that keeps v small, then a same-sign
// spike of full magnitude that inflates mhat relative to sqrt(vhat), then tiny again.
Vector gen_adversarial(Rng& rng, std::size_t T, std::size_t d, double G) {
    Vector g(T * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t prefix = static_cast<std::size_t>(rng.uniform_int(0, T - 1));
        const std::size_t spike = static_cast<std::size_t>(rng.uniform_int(1, T - prefix));
        const bool exact_zero = rng.uniform01() < 0.5;
        const double tiny = G * std::pow(10.0, -rng.uniform(1.0, 8.0));
        const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        const double level = G * rng.uniform(0.5, 1.0);
        const bool alternate_tail = rng.uniform01() < 0.5;
        for (std::size_t t = 0; t < T; ++t) {
            double x;
            if (t < prefix) {
                x = exact_zero ? 0.0 : tiny * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
            } else if (t < prefix + spike) {
                x = sign * level;
            } else {
                x = exact_zero ? 0.0 : (alternate_tail && (t % 2) ? -tiny : tiny);
            }
            g[t * d + i] = x;
        }
    }
    return g;
}

struct TrialOutcome {
    double rel_slack = kInf;
    double abs_slack = kInf;
    bool near_miss = false;
    NearMiss near;
    std::optional<Counterexample> cx;
};

TrialOutcome screen(const FuzzCandidate& c, std::size_t trial) {
    TrialOutcome out;
    const ConjectureReport dbl = conjecture_sides_at(c.seq, c.params, Precision::double_precision);
    if (!is_near_miss(dbl)) {
        out.rel_slack = relative_slack(dbl, &out.abs_slack);
        return out;
    }
    const ConjectureReport ext = conjecture_sides_at(c.seq, c.params, Precision::extended);
    out.rel_slack = relative_slack(ext, &out.abs_slack);
    out.near_miss = true;
    out.near = NearMiss{trial,           c.param_index, c.family,    c.seq.horizon(),
                        dbl.min_slack,   ext.min_slack, ext.violated};
    if (ext.violated) {
        ConjectureReport rep = ext;
        rep.escalated = true;
        out.cx = Counterexample{trial, c, std::move(rep)};
    }
    return out;
}

std::string join_values(const Vector& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) s += ' ';
        s += format_double(v[k]);
    }
    return s;
}

GradFamily parse_family(const std::string& s) {
    for (auto f : {GradFamily::uniform, GradFamily::gaussian_clipped, GradFamily::sparse_runs,
                   GradFamily::adversarial, GradFamily::injected}) {
        if (to_string(f) == s) return f;
    }
    throw ConfigError("unknown gradient family '" + s + "'");
}

}  // namespace

ConjectureReport conjecture_sides_at(const GradSequence& seq, const HyperParams& p,
                                     Precision precision) {
    p.validate();
    ConjectureReport r = precision == Precision::extended
                             ? make_report(moment_sides<Extended>(seq, p))
                             : make_report(moment_sides<double>(seq, p));
    r.escalated = precision == Precision::extended;
    return r;
}

ConjectureReport conjecture_sides(const GradSequence& seq, const HyperParams& p) {
    ConjectureReport r = conjecture_sides_at(seq, p, Precision::double_precision);
    if (is_near_miss(r)) return conjecture_sides_at(seq, p, Precision::extended);
    r.violated = false;
    return r;
}

double conjecture_lhs(const GradSequence& seq, const HyperParams& p, std::size_t i) {
    return conjecture_sides_at(seq, p, Precision::double_precision).lhs.at(i);
}

double conjecture_rhs(const GradSequence& seq, const HyperParams& p, std::size_t i) {
    return conjecture_sides_at(seq, p, Precision::double_precision).rhs.at(i);
}

std::string_view to_string(GradFamily f) noexcept {
    switch (f) {
        case GradFamily::uniform: return "uniform";
        case GradFamily::gaussian_clipped: return "gaussian-clipped";
        case GradFamily::sparse_runs: return "sparse-runs";
        case GradFamily::adversarial: return "adversarial";
        case GradFamily::injected: return "injected";
    }
    return "unknown";
}

std::vector<HyperParams> default_conjecture_grid() {
    struct Triple {
        double beta1, beta2, lambda;
    };
    static constexpr Triple triples[] = {
        {0.9, 0.999, 0.999}, {0.9, 0.999, 0.5}, {0.99, 0.999, 0.999}, {0.5, 0.9, 0.9},
        {0.99, 0.98, 0.01},  {0.7, 0.5, 0.1},   {0.95, 0.9, 0.3},     {0.3, 0.1, 0.5},
        {0.9, 0.99, 0.01},   {0.8, 0.7, 0.05},
    };
    std::vector<HyperParams> grid;
    for (const auto& tr : triples) {
        HyperParams p;
        p.beta1 = tr.beta1;
        p.beta2 = tr.beta2;
        p.lambda = tr.lambda;
        grid.push_back(p);
    }
    return grid;
}

FuzzCandidate generate_candidate(const FuzzConfig& cfg, std::size_t trial) {
    if (cfg.grid.empty()) throw InvalidParams("fuzz grid is empty");
    if (cfg.T_max == 0 || cfg.d == 0) throw InvalidParams("fuzz needs T_max >= 1 and d >= 1");
    Rng rng(derive_seed(cfg.seed, trial));
    const std::size_t pidx = trial % cfg.grid.size();
    const auto family = static_cast<GradFamily>((trial / cfg.grid.size()) % 4);
    const std::size_t T = static_cast<std::size_t>(rng.uniform_int(1, cfg.T_max));
    const double G = cfg.g_inf;
    Vector g;
    switch (family) {
        case GradFamily::uniform: g = gen_uniform(rng, T * cfg.d, G); break;
        case GradFamily::gaussian_clipped: g = gen_gaussian_clipped(rng, T * cfg.d, G); break;
        case GradFamily::sparse_runs: g = gen_sparse_runs(rng, T, cfg.d, G); break;
        default: g = gen_adversarial(rng, T, cfg.d, G); break;
    }
    return FuzzCandidate{cfg.grid[pidx], GradSequence(cfg.d, std::move(g), G), family, pidx};
}

FuzzSummary conjecture_fuzz(const FuzzConfig& cfg) {
    for (const auto& p : cfg.grid) p.validate();
    for (const auto& c : cfg.injected) c.params.validate();

    FuzzSummary s;
    s.trials = cfg.n_trials + cfg.injected.size();
    s.min_relative_slack = kInf;
    s.min_slack = kInf;
    if (s.trials == 0) return s;

    std::vector<TrialOutcome> outcomes(s.trials);
    std::atomic<std::size_t> next{0};
    constexpr std::size_t chunk = 256;
    auto worker = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= s.trials) return;
            const std::size_t end = std::min(begin + chunk, s.trials);
            for (std::size_t k = begin; k < end; ++k) {
                if (k < cfg.n_trials) {
                    outcomes[k] = screen(generate_candidate(cfg, k), k);
                } else {
                    outcomes[k] = screen(cfg.injected[k - cfg.n_trials], k);
                }
            }
        }
    };
    std::size_t threads = cfg.threads ? cfg.threads : thread_count_from_env();
    threads = std::max<std::size_t>(1, std::min(threads, (s.trials + chunk - 1) / chunk));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    }

    // Reduction in trial order; the first trial wins ties.
    for (std::size_t k = 0; k < s.trials; ++k) {
        auto& o = outcomes[k];
        s.min_slack = std::min(s.min_slack, o.abs_slack);
        if (o.rel_slack < s.min_relative_slack) {
            s.min_relative_slack = o.rel_slack;
            s.argmin_trial = k;
        }
        if (o.near_miss) s.near_misses.push_back(o.near);
        if (o.cx) s.violations.push_back(std::move(*o.cx));
    }
    if (s.argmin_trial) {
        const std::size_t k = *s.argmin_trial;
        s.argmin = k < cfg.n_trials ? generate_candidate(cfg, k) : cfg.injected[k - cfg.n_trials];
    }
    return s;
}

void write_counterexample(std::ostream& os, const Counterexample& cx) {
    const auto& c = cx.candidate;
    const auto& p = c.params;
    const auto& r = cx.report;
    os << "# moment-ratio inequality counterexample (replay with `adamregret replay`)\n"
       << "trial = " << cx.trial << '\n'
       << "family = " << to_string(c.family) << '\n'
       << "param_index = " << c.param_index << '\n'
       << "eta = " << format_double(p.eta) << '\n'
       << "beta1 = " << format_double(p.beta1) << '\n'
       << "beta2 = " << format_double(p.beta2) << '\n'
       << "lambda = " << format_double(p.lambda) << '\n'
       << "epsilon = " << format_double(p.epsilon) << '\n'
       << "alpha = " << format_double(p.alpha) << '\n'
       << "gamma = " << format_double(p.gamma()) << '\n'
       << "T = " << c.seq.horizon() << '\n'
       << "d = " << c.seq.dim() << '\n'
       << "g_inf = " << format_double(c.seq.cap()) << '\n'
       << "lhs = " << join_values(r.lhs) << '\n'
       << "rhs = " << join_values(r.rhs) << '\n'
       << "slack = " << format_double(r.min_slack) << '\n'
       << "argmin_coordinate = " << r.argmin_coordinate << '\n'
       << "escalated = " << (r.escalated ? 1 : 0) << '\n'
       << "violated = " << (r.violated ? 1 : 0) << '\n'
       << "g = " << join_values(c.seq.data()) << '\n';
}

Counterexample read_counterexample(std::istream& in, const std::string& source) {
    const KeyValues kv = KeyValues::parse(in, source);
    HyperParams p;
    p.eta = kv.get_double("eta", p.eta);
    p.beta1 = kv.get_double("beta1", p.beta1);
    p.beta2 = kv.get_double("beta2", p.beta2);
    p.lambda = kv.get_double("lambda", p.lambda);
    p.epsilon = kv.get_double("epsilon", p.epsilon);
    p.alpha = kv.get_double("alpha", p.alpha);
    const std::size_t T = kv.require_uint("T");
    const std::size_t d = kv.require_uint("d");
    Vector g = kv.get_double_list("g");
    if (g.size() != T * d) throw ConfigError(source + ": gradient matrix has the wrong size");

    Counterexample cx{kv.get_uint("trial", 0),
                      FuzzCandidate{p, GradSequence(d, std::move(g), kv.get_double("g_inf", 1.0)),
                                    parse_family(kv.get_string("family", "injected")),
                                    kv.get_uint("param_index", 0)},
                      {}};
    cx.report.lhs = kv.get_double_list("lhs");
    cx.report.rhs = kv.get_double_list("rhs");
    cx.report.min_slack = kv.get_double("slack", 0.0);
    cx.report.argmin_coordinate = kv.get_uint("argmin_coordinate", 0);
    cx.report.escalated = kv.get_uint("escalated", 0) != 0;
    cx.report.violated = kv.get_uint("violated", 0) != 0;
    return cx;
}

Counterexample load_counterexample(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    return read_counterexample(in, path.string());
}

ReplayResult replay_counterexample(const Counterexample& cx) {
    const ConjectureReport r = conjecture_sides(cx.candidate.seq, cx.candidate.params);
    ReplayResult out;
    out.recorded_slack = cx.report.min_slack;
    out.replayed_slack = r.min_slack;
    const double scale = std::max(std::abs(out.recorded_slack), std::numeric_limits<double>::min());
    out.relative_difference = std::abs(out.replayed_slack - out.recorded_slack) / scale;
    out.violated = r.violated;
    return out;
}

void write_fuzz_summary(std::ostream& os, const FuzzConfig& cfg, const FuzzSummary& s) {
    const std::size_t confirmed = s.violations.size();
    os << "moment-ratio inequality fuzz summary\n"
       << "seed                 " << cfg.seed << '\n'
       << "trials               " << s.trials << " (generated " << cfg.n_trials << ", injected "
       << cfg.injected.size() << ")\n"
       << "T_max d g_inf        " << cfg.T_max << ' ' << cfg.d << ' ' << format_double(cfg.g_inf)
       << '\n'
       << "near-miss threshold  slack < " << format_double(kNearMissThreshold) << " * rhs\n"
       << "grid (beta1 beta2 lambda gamma):\n";
    for (std::size_t k = 0; k < cfg.grid.size(); ++k) {
        const auto& p = cfg.grid[k];
        os << "  [" << k << "] " << format_double(p.beta1) << ' ' << format_double(p.beta2) << ' '
           << format_double(p.lambda) << ' ' << format_double(p.gamma()) << '\n';
    }
    os << "min slack            " << format_double(s.min_slack) << '\n'
       << "min relative slack   " << format_double(s.min_relative_slack) << '\n';
    if (s.argmin_trial && s.argmin) {
        os << "argmin trial         " << *s.argmin_trial << " (param " << s.argmin->param_index
           << ", family " << to_string(s.argmin->family) << ", T " << s.argmin->seq.horizon()
           << ")\n"
           << "argmin sequence      " << join_values(s.argmin->seq.data()) << '\n';
    }
    os << "near misses          " << s.near_misses.size() << " (all re-evaluated in extended precision)\n"
       << "confirmed violations " << confirmed << '\n';
    std::vector<std::size_t> per_param(cfg.grid.size(), 0);
    for (const auto& v : s.violations) {
        if (v.trial < cfg.n_trials && v.candidate.param_index < per_param.size()) {
            ++per_param[v.candidate.param_index];
        }
    }
    if (confirmed) {
        os << "violations by grid entry:\n";
        for (std::size_t k = 0; k < per_param.size(); ++k) {
            os << "  [" << k << "] " << per_param[k] << '\n';
        }
        os << "violations (trial param family T slack):\n";
        for (const auto& v : s.violations) {
            os << "  " << v.trial << ' ' << v.candidate.param_index << ' '
               << to_string(v.candidate.family) << ' ' << v.candidate.seq.horizon() << ' '
               << format_double(v.report.min_slack) << '\n';
        }
    }
}

void write_near_misses_csv(std::ostream& os, const FuzzSummary& s) {
    os << "trial,param_index,family,T,double_slack,extended_slack,confirmed\n";
    for (const auto& n : s.near_misses) {
        os << n.trial << ',' << n.param_index << ',' << to_string(n.family) << ',' << n.T << ','
           << format_double(n.double_slack) << ',' << format_double(n.extended_slack) << ','
           << (n.confirmed ? 1 : 0) << '\n';
    }
}

std::size_t thread_count_from_env() {
    if (const char* env = std::getenv("ADAMREGRET_THREADS")) {
        if (auto v = parse_uint(env); v && *v > 0) return static_cast<std::size_t>(*v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

}  // namespace adamregret
