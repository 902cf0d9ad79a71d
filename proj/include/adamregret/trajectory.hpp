#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "adamregret/core.hpp"

namespace adamregret {

/// Append-only record of an ADAM run, steps t = 1..T in order.
class Trajectory {
public:
    Trajectory(std::size_t d, HyperParams params);

    /// Appends `rec`. Throws SequencingError unless rec.t == size() + 1,
    /// LengthMismatch if any vector in `rec` is not of length d.
    void append(StepRecord rec);

    std::size_t dim() const noexcept { return d_; }
    std::size_t horizon() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const HyperParams& params() const noexcept { return params_; }
    const std::vector<StepRecord>& records() const noexcept { return records_; }

    /// Record for 1-based step t.
    const StepRecord& at(std::size_t t) const { return records_.at(t - 1); }

    /// w(0), ..., w(T). Requires a nonempty trajectory.
    std::vector<Vector> iterates() const;

    bool operator==(const Trajectory&) const = default;

private:
    std::size_t d_;
    HyperParams params_;
    std::vector<StepRecord> records_;
};

/// Functional form of Trajectory::append.
Trajectory record_step(Trajectory traj, StepRecord rec);

/// CSV with header `t,i,w_before,g,e,m_hat,v_hat,w_after`, one row per (t, i).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace adamregret
