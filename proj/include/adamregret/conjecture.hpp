#pragma once

// Moment-ratio inequality probe.
//
// For a gradient sequence g_1..g_T and coordinate i the inequality under test is
//
//   sum_t mhat_{t,i}^2 / sqrt(t vhat_{t,i})  <=  2 / ((1-gamma) sqrt(1-beta2)) |g_{1:T,i}|_2
//
// with mhat, vhat produced by the ADAM moment recursions (no weight update).
// Double precision is used to screen; any candidate whose slack falls below
// 1e-6 * rhs is re-evaluated with a 192-bit binary significand before it is
// reported as a violation.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adamregret/core.hpp"

namespace adamregret {

/// Relative slack below which a double-precision result is escalated.
inline constexpr double kNearMissThreshold = 1e-6;

enum class Precision { double_precision, extended };

struct ConjectureReport {
    Vector lhs;
    Vector rhs;
    double min_slack = 0.0;            // min_i rhs_i - lhs_i
    std::size_t argmin_coordinate = 0;
    bool escalated = false;            // extended precision was used for the final numbers
    bool violated = false;             // min_slack < 0 after escalation
};

/// Screens in double precision and escalates near-misses; see file comment.
/// Zero-over-zero terms (vhat = 0, hence mhat = 0) contribute nothing.
/// Throws InvalidParams if gamma >= 1.
ConjectureReport conjecture_sides(const GradSequence& seq, const HyperParams& p);

/// Evaluates both sides at a fixed precision, without screening logic.
ConjectureReport conjecture_sides_at(const GradSequence& seq, const HyperParams& p,
                                     Precision precision);

/// LHS / RHS of one coordinate computed in double precision.
double conjecture_lhs(const GradSequence& seq, const HyperParams& p, std::size_t i);
double conjecture_rhs(const GradSequence& seq, const HyperParams& p, std::size_t i);

enum class GradFamily { uniform, gaussian_clipped, sparse_runs, adversarial, injected };

std::string_view to_string(GradFamily f) noexcept;

/// A parameter set paired with a gradient sequence.
struct FuzzCandidate {
    HyperParams params;
    GradSequence seq;
    GradFamily family = GradFamily::injected;
    std::size_t param_index = 0;
};

struct FuzzConfig {
    std::size_t n_trials = 0;
    std::size_t T_max = 64;
    std::size_t d = 1;
    std::vector<HyperParams> grid;
    std::uint64_t seed = 0;
    double g_inf = 1.0;
    /// Worker threads; 0 means thread_count_from_env().
    std::size_t threads = 0;
    /// Extra candidates screened after the generated trials (trial ids continue
    /// from n_trials). Used to check that detection and serialization work.
    std::vector<FuzzCandidate> injected;
};

/// One escalated candidate and what extended precision concluded.
struct NearMiss {
    std::size_t trial = 0;
    std::size_t param_index = 0;
    GradFamily family = GradFamily::uniform;
    std::size_t T = 0;
    double double_slack = 0.0;
    double extended_slack = 0.0;
    bool confirmed = false;
};

struct Counterexample {
    std::size_t trial = 0;
    FuzzCandidate candidate;
    ConjectureReport report;
};

struct FuzzSummary {
    std::size_t trials = 0;
    /// min over trials and coordinates of (rhs - lhs) / rhs; +inf when nothing was screened.
    double min_relative_slack = 0.0;
    /// min over trials and coordinates of rhs - lhs; +inf when nothing was screened.
    double min_slack = 0.0;
    std::optional<std::size_t> argmin_trial;
    std::optional<FuzzCandidate> argmin;
    std::vector<NearMiss> near_misses;
    std::vector<Counterexample> violations;
};

/// The grid used when none is given: ten (beta1, beta2, lambda) triples, all gamma < 1.
std::vector<HyperParams> default_conjecture_grid();

/// Deterministic candidate for `trial`: parameters cycle through the grid,
/// families cycle through the four generated kinds, T ~ U{1..T_max}, and all
/// randomness comes from derive_seed(cfg.seed, trial).
FuzzCandidate generate_candidate(const FuzzConfig& cfg, std::size_t trial);

/// Runs the search. Trials are evaluated in parallel; the summary does not
/// depend on the thread count. Throws InvalidParams if a grid entry has gamma >= 1.
FuzzSummary conjecture_fuzz(const FuzzConfig& cfg);

/// Replayable text form (key = value, 17 significant digits).
void write_counterexample(std::ostream& os, const Counterexample& cx);
Counterexample read_counterexample(std::istream& in, const std::string& source = "<input>");
Counterexample load_counterexample(const std::filesystem::path& path);

struct ReplayResult {
    double recorded_slack = 0.0;
    double replayed_slack = 0.0;
    double relative_difference = 0.0;
    bool violated = false;
};

/// Re-evaluates a stored counterexample through conjecture_sides.
ReplayResult replay_counterexample(const Counterexample& cx);

void write_fuzz_summary(std::ostream& os, const FuzzConfig& cfg, const FuzzSummary& s);
void write_near_misses_csv(std::ostream& os, const FuzzSummary& s);

/// Worker count from ADAMREGRET_THREADS (positive integer), else the hardware concurrency.
std::size_t thread_count_from_env();

}  // namespace adamregret
