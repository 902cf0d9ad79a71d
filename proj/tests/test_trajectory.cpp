#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <string>

#include "adamregret/errors.hpp"
#include "adamregret/rng.hpp"
#include "adamregret/trajectory.hpp"

using namespace adamregret;

namespace {

StepRecord make_record(std::size_t t, double x) {
    StepRecord r;
    r.t = t;
    r.w_before = {x};
    r.g = {x};
    r.e = x;
    r.m_hat = {x};
    r.v_hat = {x * x};
    r.w_after = {x};
    return r;
}

}  // namespace

TEST(Trajectory, AppendFirstRecord) {
    Trajectory traj = record_step(Trajectory(1, HyperParams{}), make_record(1, 0.5));
    EXPECT_EQ(traj.horizon(), 1u);
    EXPECT_EQ(traj.at(1).e, 0.5);
}

TEST(Trajectory, GapIsSequencingError) {
    Trajectory traj(1, HyperParams{});
    traj.append(make_record(1, 0.5));
    EXPECT_THROW(traj.append(make_record(3, 0.5)), SequencingError);
}

TEST(Trajectory, DuplicateIsSequencingError) {
    Trajectory traj(1, HyperParams{});
    traj.append(make_record(1, 0.5));
    EXPECT_THROW(traj.append(make_record(1, 0.5)), SequencingError);
    EXPECT_THROW(Trajectory(1, HyperParams{}).append(make_record(0, 0.5)), SequencingError);
}

TEST(Trajectory, WrongVectorLengthRejected) {
    Trajectory traj(2, HyperParams{});
    EXPECT_THROW(traj.append(make_record(1, 0.5)), LengthMismatch);
}

TEST(Trajectory, IteratesStartWithInitialPoint) {
    Trajectory traj(1, HyperParams{});
    StepRecord r = make_record(1, 0.0);
    r.w_before = {3.0};
    r.w_after = {2.0};
    traj.append(r);
    const auto pts = traj.iterates();
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0][0], 3.0);
    EXPECT_EQ(pts[1][0], 2.0);
}

TEST(TrajectoryCsv, HeaderAndOneRowPerCoordinate) {
    Trajectory traj(2, HyperParams{});
    StepRecord r;
    r.t = 1;
    r.w_before = {0.1, -2.0};
    r.g = {1.0, 2.0};
    r.e = 0.3;
    r.m_hat = {1.0, 2.0};
    r.v_hat = {1.0, 4.0};
    r.w_after = {0.0, -3.0};
    traj.append(r);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    EXPECT_EQ(os.str(),
              "t,i,w_before,g,e,m_hat,v_hat,w_after\n"
              "1,0,0.10000000000000001,1,0.29999999999999999,1,1,0\n"
              "1,1,-2,2,0.29999999999999999,2,4,-3\n");
}

TEST(FormatDouble, RoundTripsExactly) {
    Rng rng = seeded_rng(5);
    for (int k = 0; k < 2000; ++k) {
        const double x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.uniform_int(0, 200)) - 100);
        const std::string s = format_double(x);
        const double back = std::strtod(s.c_str(), nullptr);
        ASSERT_EQ(std::bit_cast<std::uint64_t>(x), std::bit_cast<std::uint64_t>(back)) << s;
    }
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}
