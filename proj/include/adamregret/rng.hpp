#pragma once

// Portable random stream: xoshiro256** seeded through SplitMix64.
//
// Both generators are fully specified integer recurrences, so a given seed
// produces the same stream on every platform and in every language that
// implements them (reference: Blackman & Vigna, https://prng.di.unimi.it/).
// Reals are derived from the top 53 bits of each output; normals use the
// Marsaglia polar method, which needs only sqrt and log.

#include <array>
#include <cstdint>

namespace adamregret {

/// One SplitMix64 step. Advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derives an independent child seed from (seed, stream), e.g. one per fuzz trial.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    /// Raw 64-bit output of xoshiro256**.
    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept;

    /// Uniform on [a, b).
    double uniform(double a, double b) noexcept;

    /// Uniform integer on [lo, hi] (inclusive), via rejection to avoid modulo bias.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept;

    /// Standard normal N(0, 1).
    double normal() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Deterministic stream for `seed`.
inline Rng seeded_rng(std::uint64_t seed) noexcept { return Rng(seed); }

}  // namespace adamregret
