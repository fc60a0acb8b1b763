#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "vlscan/laser.hpp"
#include "vlscan/poses.hpp"
#include "vlscan/scenarios.hpp"

using namespace vlscan;
using vlscan::test::error_code_of;

namespace {

PoseConstraints laser_constraints(int count, std::uint64_t seed) {
  PoseConstraints c;
  c.count = count;
  c.seed = seed;
  c.laser_plane = laser_plane(reference_laser());
  return c;
}

}  // namespace

TEST(GeneratePoses, SameSeedSamePoses) {
  const Intrinsics K = reference_intrinsics(0.5);
  const CheckerboardSpec spec;
  const auto a = generate_poses(K, spec, laser_constraints(10, 4));
  const auto b = generate_poses(K, spec, laser_constraints(10, 4));
  const auto c = generate_poses(K, spec, laser_constraints(10, 5));
  ASSERT_EQ(a.size(), 10u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].R, b[i].R);
    EXPECT_EQ(a[i].t, b[i].t);
  }
  EXPECT_NE(a[0].t, c[0].t);
}

TEST(GeneratePoses, ThirtyEightValidPoses) {
  const Intrinsics K = reference_intrinsics(0.5);
  const CheckerboardSpec spec;
  const PoseConstraints c = laser_constraints(38, 1);
  const auto poses = generate_poses(K, spec, c);
  ASSERT_EQ(poses.size(), 38u);
  for (const Pose& p : poses) {
    EXPECT_NEAR(p.R.determinant(), 1.0, 1e-12);
    EXPECT_LT((p.R.transpose() * p.R - Mat3::Identity()).norm(), 1e-12);
    EXPECT_LE(board_tilt(p), c.max_tilt + 1e-12);
    EXPECT_TRUE(board_in_frame(K, spec, p, c.margin_px));
    EXPECT_TRUE(plane_crosses_board(*c.laser_plane, spec, p));
    EXPECT_GE(p.t.z(), c.min_distance - 1e-12);
    EXPECT_LE(p.t.z(), c.max_distance + 1e-12);
    // Board +z points away from the camera.
    EXPECT_GT(p.R.col(2).dot(p.t), 0.0);
  }
}

TEST(GeneratePoses, TiltsCoverTheRange) {
  const auto poses = generate_poses(reference_intrinsics(0.5), CheckerboardSpec{}, laser_constraints(38, 1));
  double max_tilt = 0.0;
  for (const Pose& p : poses) max_tilt = std::max(max_tilt, board_tilt(p));
  EXPECT_GT(max_tilt, 0.5);
}

TEST(GeneratePoses, ImpossibleConstraintsAreConfigErrors) {
  const Intrinsics K = reference_intrinsics(0.5);
  PoseConstraints c;
  c.count = 3;
  c.min_distance = 0.05;
  c.max_distance = 0.06;  // a 0.4 m sheet cannot fit in the image this close
  c.max_attempts = 2000;
  EXPECT_EQ(error_code_of([&] { generate_poses(K, CheckerboardSpec{}, c); }), ErrorCode::kConfigError);
  PoseConstraints away = laser_constraints(3, 1);
  away.laser_plane = PlaneParams{1, 0, 0, -5};  // x = 5 m never meets the board
  away.max_attempts = 2000;
  EXPECT_EQ(error_code_of([&] { generate_poses(K, CheckerboardSpec{}, away); }), ErrorCode::kConfigError);
}

TEST(BoardTilt, Examples) {
  EXPECT_EQ(board_tilt(Pose{}), 0.0);
  EXPECT_NEAR(board_tilt(Pose{rot_y(0.4), Vec3(0, 0, 1)}), 0.4, 1e-12);
  EXPECT_NEAR(board_tilt(Pose{rot_z(1.0) * rot_x(-0.3), Vec3(0, 0, 1)}), 0.3, 1e-12);
}

TEST(BoardInFrame, CenteredAndOffscreen) {
  const Intrinsics K = reference_intrinsics(0.5);
  const CheckerboardSpec spec;
  EXPECT_TRUE(board_in_frame(K, spec, Pose::translation(Vec3(0, 0, 1)), 10));
  EXPECT_FALSE(board_in_frame(K, spec, Pose::translation(Vec3(0.5, 0, 1)), 10));
  EXPECT_FALSE(board_in_frame(K, spec, Pose::translation(Vec3(0, 0, -1)), 10));
}

TEST(PlaneCrossesBoard, Examples) {
  const CheckerboardSpec spec;
  const Pose at_one = Pose::translation(Vec3(0, 0, 1));
  EXPECT_TRUE(plane_crosses_board({1, 0, 0, 0}, spec, at_one));
  EXPECT_TRUE(plane_crosses_board({1, 0, 0, -0.19}, spec, at_one));
  EXPECT_FALSE(plane_crosses_board({1, 0, 0, -0.21}, spec, at_one));
  EXPECT_FALSE(plane_crosses_board({0, 0, 1, -2}, spec, at_one));
}
