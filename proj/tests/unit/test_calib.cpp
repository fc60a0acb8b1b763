#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>

#include "test_support.hpp"
#include "vlscan/calib.hpp"
#include "vlscan/error.hpp"
#include "vlscan/scene.hpp"

using namespace vlscan;
using vlscan::test::Rng;
using vlscan::test::error_code_of;

namespace {

const PlaneParams kPhiGt{0.9744, 0.0, 0.2250, -0.1949};

double transfer_cost(const Homography& H, std::span<const Correspondence2D3D> c) {
  double sum = 0.0;
  for (double e : transfer_errors(H, c)) sum += e * e;
  return sum;
}

std::vector<Vec2> board_grid() { return test::grid_points(12, 8, 0.025); }

void expect_jacobian_matches(const LeastSquaresProblem& prob, const Eigen::VectorXd& x) {
  Eigen::MatrixXd J;
  prob.jacobian(x, J);
  const Eigen::MatrixXd F = finite_difference_jacobian(prob.residual, x);
  EXPECT_LT((J - F).norm(), 1e-6 * std::max(1.0, J.norm()));
}

}  // namespace

TEST(Dlt, UnitSquareIdentity) {
  std::vector<Correspondence2D3D> c;
  for (const Vec2& p : {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}) c.push_back({p, p});
  const Homography H = estimate_homography_dlt(c);
  EXPECT_LT(test::projective_distance(H.H, Mat3::Identity()), 1e-12);
}

TEST(Dlt, RecoversRandomHomography) {
  Rng rng(61);
  for (int i = 0; i < 50; ++i) {
    const Mat3 truth = test::random_homography(rng);
    const auto c = test::correspondences(truth, test::grid_points(5, 4, 0.3));
    const Homography H = estimate_homography_dlt(c);
    EXPECT_LT(test::projective_distance(H.H, truth), 1e-8);
    EXPECT_LT(max_transfer_error(H, c), 1e-8);
  }
}

TEST(Dlt, DegenerateInputs) {
  std::vector<Correspondence2D3D> three{{Vec2(0, 0), Vec2(0, 0)}, {Vec2(1, 0), Vec2(1, 0)}, {Vec2(0, 1), Vec2(0, 1)}};
  EXPECT_EQ(error_code_of([&] { estimate_homography_dlt(three); }), ErrorCode::kDegenerateConfiguration);
  std::vector<Correspondence2D3D> collinear;
  for (int i = 0; i < 6; ++i) collinear.push_back({Vec2(i, 2 * i), Vec2(i, 0)});
  EXPECT_EQ(error_code_of([&] { estimate_homography_dlt(collinear); }), ErrorCode::kDegenerateConfiguration);
}

TEST(Dlt, SimilarityInvariance) {
  Rng rng(62);
  for (int i = 0; i < 50; ++i) {
    auto c = test::correspondences(test::random_homography(rng), test::grid_points(6, 5, 0.2));
    for (auto& x : c) x.image += Vec2(rng.normal(0.01), rng.normal(0.01));
    const double a = rng.uniform(0, 2 * M_PI), s = rng.uniform(0.1, 10);
    Mat3 S = Mat3::Identity();
    S.topLeftCorner<2, 2>() = s * Eigen::Rotation2Dd(a).toRotationMatrix();
    S.topRightCorner<2, 1>() = Vec2(rng.uniform(-100, 100), rng.uniform(-100, 100));
    auto moved = c;
    for (auto& x : moved) x.image = test::apply_homography(S, x.image);
    const Homography H = estimate_homography_dlt(c);
    const Homography Hs = estimate_homography_dlt(moved);
    EXPECT_LT(test::projective_distance(Hs.H, S * H.H), 1e-10);
  }
}

TEST(RefineHomography, NoiselessTruthIsAFixedPoint) {
  Rng rng(63);
  const Mat3 truth = test::random_homography(rng);
  const auto c = test::correspondences(truth, board_grid());
  const HomographyRefinement r = refine_homography(Homography::normalized(truth), c);
  EXPECT_LT(r.report.initial_cost, 1e-16);
  EXPECT_EQ(r.report.iterations, 0);
  EXPECT_LT(test::projective_distance(r.homography.H, truth), 1e-12);
}

TEST(RefineHomography, NeverWorseThanDltUnderNoise) {
  Rng rng(64);
  const Intrinsics K = test::random_intrinsics(rng);
  for (int trial = 0; trial < 100; ++trial) {
    const Pose pose = test::random_board_pose(rng, 0.5);
    auto c = test::correspondences(homography_from_pose(pose, K).H, board_grid());
    ASSERT_EQ(c.size(), 96u);
    for (auto& x : c) x.image += Vec2(rng.normal(0.1), rng.normal(0.1));
    const Homography dlt = estimate_homography_dlt(c);
    const HomographyRefinement r = refine_homography(dlt, c);
    EXPECT_LE(transfer_cost(r.homography, c), transfer_cost(dlt, c));
    EXPECT_LE(r.report.final_cost, r.report.initial_cost);
  }
}

TEST(RefineHomography, RecoversFromOnePercentPerturbation) {
  Rng rng(65);
  for (int i = 0; i < 20; ++i) {
    const Mat3 truth = test::random_homography(rng);
    const auto c = test::correspondences(truth, board_grid());
    Mat3 start = truth;
    for (int k = 0; k < 9; ++k) start(k / 3, k % 3) *= 1.0 + 0.01 * (rng.uniform() < 0.5 ? -1 : 1);
    const HomographyRefinement r = refine_homography(Homography::normalized(start), c);
    EXPECT_LT(max_transfer_error(r.homography, c), 1e-6);
  }
}

TEST(RefineHomography, AnalyticJacobianMatchesFiniteDifferences) {
  Rng rng(66);
  const auto c = test::correspondences(test::random_homography(rng), board_grid());
  const LeastSquaresProblem prob = homography_problem(c);
  for (int i = 0; i < 20; ++i) {
    const Mat3 H = test::random_homography(rng);
    Eigen::VectorXd x(9);
    for (int k = 0; k < 9; ++k) x(k) = H(k / 3, k % 3);
    expect_jacobian_matches(prob, x);
  }
}

TEST(PoseFromHomography, RoundTrip) {
  Rng rng(67);
  for (int i = 0; i < 500; ++i) {
    const Intrinsics K = test::random_intrinsics(rng);
    const Pose truth = test::random_board_pose(rng, rng.uniform(0.3, 3.0), 1.2);
    const Pose p = pose_from_homography(homography_from_pose(truth, K), K);
    EXPECT_LT(rotation_geodesic(p.R, truth.R), 1e-8);
    EXPECT_LT((p.t - truth.t).norm(), 1e-9);
  }
}

TEST(PoseFromHomography, FrontoParallelBoard) {
  const Intrinsics K = test::small_intrinsics();
  const Pose p = pose_from_homography(homography_from_pose(Pose::translation(Vec3(0, 0, 1)), K), K);
  EXPECT_LT((p.t - Vec3(0, 0, 1)).norm(), 1e-9);
  EXPECT_LT((p.R - Mat3::Identity()).norm(), 1e-9);
}

TEST(PoseFromHomography, SignFlipKeepsBoardInFront) {
  const Intrinsics K = test::small_intrinsics();
  Homography H = homography_from_pose(Pose::translation(Vec3(0.1, 0, 2)), K);
  H.H = -H.H;
  EXPECT_GT(pose_from_homography(H, K).t.z(), 0.0);
}

TEST(PoseFromHomography, NoisyHomographyProjectsOntoRotations) {
  Rng rng(68);
  const Intrinsics K = test::random_intrinsics(rng);
  for (int i = 0; i < 100; ++i) {
    Homography H = homography_from_pose(test::random_board_pose(rng), K);
    H.H += 1e-3 * H.H.norm() * Mat3::Random();
    const Mat3 Ki = K.inverse();
    const double l = 1.0 / (Ki * H.H.col(0)).norm();
    Mat3 raw;
    raw.col(0) = l * Ki * H.H.col(0);
    raw.col(1) = l * Ki * H.H.col(1);
    raw.col(2) = raw.col(0).cross(raw.col(1));
    EXPECT_GT(orthonormality_error(raw), 1e-6);
    const Pose p = pose_from_homography(H, K);
    EXPECT_LT(orthonormality_error(p.R), 1e-12);
    EXPECT_NEAR(p.R.determinant(), 1.0, 1e-12);
  }
}

TEST(PoseFromHomography, BoardThroughCameraCenterIsCheiralityError) {
  const Intrinsics K = test::small_intrinsics();
  const Homography H = homography_from_pose({rot_x(1.0), Vec3(0.1, 0.2, 0.0)}, K);
  EXPECT_EQ(error_code_of([&] { pose_from_homography(H, K); }), ErrorCode::kCheiralityError);
}

TEST(Zhang, AnalyticViewsRecoverIntrinsicsExactly) {
  Rng rng(69);
  for (int trial = 0; trial < 5; ++trial) {
    const Intrinsics K = test::random_intrinsics(rng);
    std::vector<Pose> poses;
    for (int i = 0; i < 8; ++i) poses.push_back(test::random_board_pose(rng, 0.6));
    const auto views = test::synthetic_views(K, poses, board_grid());
    const CameraCalibration cal = zhang_intrinsics(views, K.width, K.height);
    EXPECT_NEAR(cal.intrinsics.fx, K.fx, 1e-6);
    EXPECT_NEAR(cal.intrinsics.fy, K.fy, 1e-6);
    EXPECT_NEAR(cal.intrinsics.cx, K.cx, 1e-6);
    EXPECT_NEAR(cal.intrinsics.cy, K.cy, 1e-6);
    EXPECT_EQ(cal.intrinsics.s, 0.0);
    EXPECT_LT(cal.rms_px, 1e-6);
    EXPECT_NEAR(cal.closed_form.fx, K.fx, 1e-3);
    ASSERT_EQ(cal.poses.size(), poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) EXPECT_LT((cal.poses[i].t - poses[i].t).norm(), 1e-9);
  }
}

TEST(Zhang, SkewIsEstimatedWhenFree) {
  Rng rng(70);
  Intrinsics K = test::random_intrinsics(rng);
  K.s = 1.5;
  std::vector<Homography> hs;
  for (int i = 0; i < 6; ++i) hs.push_back(homography_from_pose(test::random_board_pose(rng, 0.6), K));
  const Intrinsics est = zhang_closed_form(hs, K.width, K.height, false);
  EXPECT_NEAR(est.s, 1.5, 1e-6);
  EXPECT_NEAR(est.fx, K.fx, 1e-6);
}

TEST(Zhang, RecoversDistortionWhenAsked) {
  Rng rng(71);
  const Intrinsics K = test::random_intrinsics(rng);
  Distortion d;
  d.k1 = -0.08;
  d.k2 = 0.05;
  d.p1 = 0.001;
  std::vector<CalibView> views;
  for (int i = 0; i < 10; ++i) {
    const Pose pose = test::random_board_pose(rng, 0.5);
    CalibView v;
    v.id = i;
    for (const Vec2& b : board_grid()) v.correspondences.push_back({project_camera_point(K, d, pose.apply(Vec3(b.x(), b.y(), 0))), b});
    views.push_back(v);
  }
  ZhangOptions o;
  o.estimate_distortion = true;
  const CameraCalibration cal = zhang_intrinsics(views, K.width, K.height, o);
  EXPECT_LT(cal.rms_px, 1e-6);
  EXPECT_NEAR(cal.distortion.k1, d.k1, 1e-6);
  EXPECT_NEAR(cal.distortion.p1, d.p1, 1e-8);
  EXPECT_NEAR(cal.intrinsics.fx, K.fx, 1e-4);
}

TEST(Zhang, TwoViewsAreInsufficient) {
  Rng rng(72);
  const Intrinsics K = test::random_intrinsics(rng);
  const auto views = test::synthetic_views(K, {test::random_board_pose(rng), test::random_board_pose(rng)}, board_grid());
  EXPECT_EQ(error_code_of([&] { zhang_intrinsics(views, K.width, K.height); }), ErrorCode::kInsufficientViews);
}

TEST(Zhang, ParallelBoardsAreDegenerate) {
  Rng rng(73);
  const Intrinsics K = test::random_intrinsics(rng);
  const Pose base = test::random_board_pose(rng);
  std::vector<Homography> hs;
  for (int i = 0; i < 5; ++i) {
    Pose p = base;
    p.t += Vec3(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.2, 0.2));
    hs.push_back(homography_from_pose(p, K));
  }
  EXPECT_EQ(error_code_of([&] { zhang_closed_form(hs, K.width, K.height); }), ErrorCode::kDegenerateMotion);
}

TEST(Backproject, CornerPixelGivesCornerPosition) {
  Rng rng(74);
  const Intrinsics K = test::random_intrinsics(rng);
  const Pose pose = test::random_board_pose(rng);
  CalibView v = test::synthetic_views(K, {pose}, board_grid())[0];
  v.homography = homography_from_pose(pose, K);
  v.pose = pose;
  for (const auto& c : v.correspondences) v.laser_pixels.push_back(c.image);
  const auto pts = backproject_laser_pixels(v, K);
  ASSERT_EQ(pts.size(), v.correspondences.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2& w = v.correspondences[i].world;
    EXPECT_LT((pts[i].point - pose.apply(Vec3(w.x(), w.y(), 0))).norm(), 1e-9);
  }
}

TEST(Backproject, PointsLieOnBoardAndLaserPlanes) {
  Rng rng(75);
  const Intrinsics K = test::random_intrinsics(rng);
  for (int trial = 0; trial < 20; ++trial) {
    const Pose pose = test::random_board_pose(rng, 0.8);
    const PlaneParams board = PlaneParams::from_point_normal(pose.t, pose.R.col(2));
    const PlaneParams laser = PlaneParams::from_point_normal(pose.t + Vec3(0.02, 0, 0), kPhiGt.normal());
    CalibView v;
    v.homography = homography_from_pose(pose, K);
    v.pose = pose;
    // Points on the intersection line of both planes.
    const Vec3 dir = board.normal().cross(laser.normal()).normalized();
    Mat3 A;
    A.row(0) = board.normal().transpose();
    A.row(1) = laser.normal().transpose();
    A.row(2) = dir.transpose();
    const Vec3 p0 = A.fullPivLu().solve(Vec3(-board.d, -laser.d, dir.dot(pose.t)));
    for (int i = -10; i <= 10; ++i) v.laser_pixels.push_back(project_camera_point(K, {}, p0 + 0.01 * i * dir));
    for (const auto& bp : backproject_laser_pixels(v, K)) {
      EXPECT_LT(std::abs(board.signed_distance(bp.point)), 1e-8);
      EXPECT_LT(std::abs(laser.signed_distance(bp.point)), 1e-8);
    }
  }
}

TEST(Backproject, OffBoardPixelsAreFlagged) {
  const Intrinsics K = test::small_intrinsics(640, 480, 500.0);
  const Pose pose = Pose::translation(Vec3(0, 0, 1));
  CalibView v;
  v.homography = homography_from_pose(pose, K);
  v.pose = pose;
  v.board_half_extent = Vec2(0.2, 0.15);
  v.laser_pixels = {Pixel(K.cx, K.cy), Pixel(K.cx + 0.3 * 500.0, K.cy)};
  const auto pts = backproject_laser_pixels(v, K);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_TRUE(pts[0].on_board);
  EXPECT_FALSE(pts[1].on_board);
  EXPECT_NEAR(pts[1].point.x(), 0.3, 1e-12);
}

TEST(Backproject, MissingPixelsThrow) {
  CalibView v;
  v.homography = Homography{};
  v.pose = Pose{};
  EXPECT_EQ(error_code_of([&] { backproject_laser_pixels(v, test::small_intrinsics()); }),
            ErrorCode::kMissingLaserPixels);
}

TEST(PlaneFit, ExactPointsOnZEqualsOne) {
  std::vector<Vec3> pts;
  Rng rng(76);
  for (int i = 0; i < 50; ++i) pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0);
  const PlaneFit fit = fit_laser_plane(pts);
  EXPECT_LT((fit.plane.vector() - Vec4(0, 0, 1, -1)).norm(), 1e-12);
  EXPECT_LT(fit.max_abs_distance, 1e-12);
}

TEST(PlaneFit, NoisyLinesRecoverPublishedPlane) {
  Rng rng(77);
  const PlaneParams truth = kPhiGt.normalized();
  const Vec3 n = truth.normal();
  const Vec3 e1 = n.unitOrthogonal(), e2 = n.cross(e1);
  std::vector<Vec3> pts;
  for (int line = 0; line < 30; ++line) {
    const Vec3 origin = truth.point_on_plane() + e1 * rng.uniform(-0.2, 0.2) + e2 * rng.uniform(-0.2, 0.2);
    const double a = rng.uniform(0, M_PI);
    const Vec3 dir = std::cos(a) * e1 + std::sin(a) * e2;
    for (int i = 0; i < 100; ++i) {
      pts.push_back(origin + dir * (-0.1 + 0.2 * i / 99.0) + Vec3(rng.normal(1e-4), rng.normal(1e-4), rng.normal(1e-4)));
    }
  }
  const PlaneFit fit = fit_laser_plane(pts);
  EXPECT_LT(normal_angle(fit.plane, truth), 1e-3);
  EXPECT_NEAR(fit.plane.normal().norm(), 1.0, 1e-6);
  EXPECT_LE(fit.final_cost, fit.initial_cost);
  EXPECT_LE(fit.report.final_cost, fit.report.initial_cost);
  EXPECT_LE(fit.plane.d, 0.0);
}

TEST(PlaneFit, ThreePointsGiveCrossProductPlane) {
  Rng rng(78);
  for (int i = 0; i < 100; ++i) {
    const std::vector<Vec3> pts{rng.vec3(), rng.vec3(), rng.vec3()};
    const Vec3 n = (pts[1] - pts[0]).cross(pts[2] - pts[0]).normalized();
    const PlaneParams expected = PlaneParams::from_point_normal(pts[0], n);
    const PlaneFit fit = fit_laser_plane(pts);
    EXPECT_LT(normal_angle(fit.plane, expected), 1e-10);
    for (const Vec3& p : pts) EXPECT_LT(std::abs(fit.plane.signed_distance(p)), 1e-10);
  }
}

TEST(PlaneFit, CollinearPointsThrow) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 10; ++i) pts.emplace_back(i, 2 * i, 3 * i);
  EXPECT_EQ(error_code_of([&] { fit_laser_plane(pts); }), ErrorCode::kCollinearPoints);
  EXPECT_EQ(error_code_of([&] { fit_laser_plane(std::vector<Vec3>{Vec3(0, 0, 0), Vec3(1, 0, 0)}); }),
            ErrorCode::kCollinearPoints);
}

TEST(PlaneFit, PermutationAndRigidCovariance) {
  Rng rng(79);
  const PlaneParams truth = PlaneParams::from_point_normal(Vec3(0.1, 0.2, 1.0), rng.unit());
  const Vec3 e1 = truth.normal().unitOrthogonal(), e2 = truth.normal().cross(e1);
  std::vector<Vec3> pts;
  for (int i = 0; i < 300; ++i) {
    pts.push_back(truth.point_on_plane() + e1 * rng.uniform(-0.2, 0.2) + e2 * rng.uniform(-0.2, 0.2) +
                  truth.normal() * rng.normal(1e-3));
  }
  const PlaneFit base = fit_laser_plane(pts);
  std::vector<Vec3> shuffled = pts;
  std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
  EXPECT_LT((fit_laser_plane(shuffled).plane.vector() - base.plane.vector()).norm(), 1e-9);

  const Pose T = rng.pose(0.5);
  std::vector<Vec3> moved;
  for (const Vec3& p : pts) moved.push_back(T.apply(p));
  const PlaneParams expected = base.plane.transformed(T).normalized();
  const PlaneParams got = fit_laser_plane(moved).plane;
  const double s = got.vector().dot(expected.vector()) < 0 ? -1.0 : 1.0;
  EXPECT_LT((got.vector() - s * expected.vector()).norm(), 1e-9);
}

TEST(PlaneFit, CostMatchesDefinition) {
  const std::vector<Vec3> pts{Vec3(0, 0, 1), Vec3(1, 0, 2), Vec3(0, 1, 1)};
  const PlaneParams p{0, 0, 2, -2};
  // |p.n + d| / |n| + (|n| - 1)^2, squared and summed.
  const double e0 = 0.0 + 1.0, e1 = 1.0 + 1.0, e2 = 0.0 + 1.0;
  EXPECT_NEAR(laser_plane_cost(p, pts), e0 * e0 + e1 * e1 + e2 * e2, 1e-15);
}

TEST(PlaneFit, AnalyticJacobianMatchesFiniteDifferences) {
  Rng rng(80);
  std::vector<Vec3> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(rng.vec3());
  const LeastSquaresProblem prob = laser_plane_problem(pts, 1.0);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd x(4);
    x << rng.unit() * rng.uniform(0.5, 2.0), rng.uniform(-1, 1);
    // Keep every point clear of the plane so |.| is differentiable there.
    bool clear = true;
    for (const Vec3& p : pts) clear &= std::abs(p.dot(x.head<3>()) + x(3)) > 1e-3;
    if (clear) expect_jacobian_matches(prob, x);
  }
}

TEST(NormalAngle, IgnoresOrientation) {
  const PlaneParams a{1, 0, 0, -1};
  EXPECT_NEAR(normal_angle(a, a.scaled(-3)), 0.0, 1e-15);
  EXPECT_NEAR(normal_angle(a, {0, 1, 0, 0}), M_PI / 2, 1e-15);
  EXPECT_NEAR(normal_angle(a, {std::cos(1e-3), std::sin(1e-3), 0, 0}), 1e-3, 1e-12);
}
