#include "adamregret/trajectory.hpp"

#include <ostream>
#include <string>

#include "adamregret/errors.hpp"

namespace adamregret {

Trajectory::Trajectory(std::size_t d, HyperParams params) : d_(d), params_(params) {
    if (d_ == 0) throw LengthMismatch("trajectory dimension must be positive");
}

void Trajectory::append(StepRecord rec) {
    const std::size_t expected = records_.size() + 1;
    if (rec.t != expected) {
        throw SequencingError("step record t = " + std::to_string(rec.t) +
                              " does not follow; expected t = " + std::to_string(expected));
    }
    for (const Vector* v : {&rec.w_before, &rec.g, &rec.m_hat, &rec.v_hat, &rec.w_after}) {
        if (v->size() != d_) throw LengthMismatch("step record vector length differs from d");
    }
    records_.push_back(std::move(rec));
}

std::vector<Vector> Trajectory::iterates() const {
    std::vector<Vector> out;
    if (records_.empty()) return out;
    out.reserve(records_.size() + 1);
    out.push_back(records_.front().w_before);
    for (const auto& r : records_) out.push_back(r.w_after);
    return out;
}

Trajectory record_step(Trajectory traj, StepRecord rec) {
    traj.append(std::move(rec));
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,i,w_before,g,e,m_hat,v_hat,w_after\n";
    for (const auto& r : traj.records()) {
        const std::string e = format_double(r.e);
        for (std::size_t i = 0; i < traj.dim(); ++i) {
            os << r.t << ',' << i << ',' << format_double(r.w_before[i]) << ','
               << format_double(r.g[i]) << ',' << e << ',' << format_double(r.m_hat[i]) << ','
               << format_double(r.v_hat[i]) << ',' << format_double(r.w_after[i]) << '\n';
        }
    }
}

}  // namespace adamregret
