#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "test_support.hpp"
#include "vlscan/error.hpp"
#include "vlscan/geom.hpp"

using namespace vlscan;
using vlscan::test::Rng;

namespace {

const PlaneParams kPhiGt{0.9744, 0.0, 0.2249, -0.1949};

template <typename F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no vlscan::Error thrown";
  return ErrorCode::kIoError;
}

}  // namespace

TEST(LinePlane, AxisAlignedUnitCase) {
  const Vec3 p = line_plane_intersect({Vec3::Zero(), Vec3(0, 0, 1)}, {0, 0, 1, -1});
  EXPECT_EQ(p, Vec3(0, 0, 1));
}

TEST(LinePlane, ParallelLineThrows) {
  EXPECT_EQ(error_code_of([] { line_plane_intersect({Vec3::Zero(), Vec3(1, 0, 0)}, {0, 0, 1, -1}); }),
            ErrorCode::kParallelLinePlane);
}

TEST(LinePlane, LineInsidePlaneThrows) {
  EXPECT_EQ(error_code_of([] { line_plane_intersect({Vec3(0, 0, 1), Vec3(1, 0, 0)}, {0, 0, 1, -1}); }),
            ErrorCode::kLineInPlane);
}

TEST(LinePlane, MatchesDirectLinearSolve) {
  const Vec3 v = Vec3(-0.13, 0.07, 1.0).normalized();
  const Vec3 p = line_plane_intersect({Vec3::Zero(), v}, kPhiGt);
  // Plane equation plus two constraints that pin the point to the line through the origin.
  const Vec3 a = v.unitOrthogonal();
  const Vec3 b = v.cross(a);
  Mat3 A;
  A.row(0) = kPhiGt.normal().transpose();
  A.row(1) = a.transpose();
  A.row(2) = b.transpose();
  const Vec3 expected = A.fullPivLu().solve(Vec3(-kPhiGt.d, 0.0, 0.0));
  EXPECT_LT((p - expected).norm(), 1e-12);
}

TEST(LinePlane, ResidualPropertyOnRandomLines) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Line3 line{rng.vec3(-2, 2), rng.vec3()};
    const PlaneParams plane = PlaneParams::from_point_normal(rng.vec3(-2, 2), rng.unit());
    if (std::abs(line.v.dot(plane.normal())) <= 1e-3 * line.v.norm()) continue;
    const LinePlaneHit hit = intersect_line_plane(line, plane);
    EXPECT_LT(std::abs(plane.evaluate(hit.point)), 1e-9 * (1.0 + hit.point.norm()));
    EXPECT_LT((hit.point - line.at(hit.lambda)).norm(), 1e-12 * (1.0 + hit.point.norm()));
  }
}

TEST(LinePlane, InvariantUnderPositiveRescaling) {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const Line3 line{rng.vec3(), rng.unit()};
    const PlaneParams plane = PlaneParams::from_point_normal(rng.vec3(), rng.unit());
    if (std::abs(line.v.dot(plane.normal())) < 0.05) continue;
    const Vec3 p = line_plane_intersect(line, plane);
    const Vec3 q = line_plane_intersect({line.l0, line.v * rng.uniform(0.01, 100.0)},
                                        plane.scaled(rng.uniform(0.01, 100.0)));
    EXPECT_LT((p - q).norm(), 1e-9);
  }
}

TEST(PlanePoint, Examples) {
  EXPECT_LT((plane_point_from_four_vector({0, 0, 1, -1}) - Vec3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LT((plane_point_from_four_vector({0, 0, 2, -2}) - Vec3(0, 0, 1)).norm(), 1e-15);
  const Vec3 p0 = plane_point_from_four_vector(kPhiGt);
  EXPECT_LT(std::abs(kPhiGt.evaluate(p0)), 1e-12);
  EXPECT_LT(p0.cross(kPhiGt.normal()).norm(), 1e-12);
}

TEST(PlanePoint, ZeroNormalThrows) {
  EXPECT_EQ(error_code_of([] { plane_point_from_four_vector({0, 0, 0, 1}); }), ErrorCode::kDegeneratePlane);
}

TEST(PlaneParams, TransformedIsCovariant) {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const PlaneParams plane = PlaneParams::from_point_normal(rng.vec3(), rng.unit());
    const Pose T = rng.pose();
    const PlaneParams moved = plane.transformed(T);
    const Vec3 p = plane.point_on_plane() + plane.normal().unitOrthogonal() * rng.uniform(-1, 1);
    EXPECT_LT(std::abs(moved.signed_distance(T.apply(p))), 1e-12);
  }
}

TEST(NearestRotation, IdentityStaysIdentity) {
  EXPECT_LT((nearest_rotation(Mat3::Identity()) - Mat3::Identity()).norm(), 1e-15);
}

TEST(NearestRotation, BeatsRandomRotations) {
  Mat3 M = rot_z(30.0 * M_PI / 180.0);
  M.array() += 0.01;
  const Mat3 R = nearest_rotation(M);
  const double best = (R - M).norm();
  Rng rng(14);
  for (int i = 0; i < 10000; ++i) EXPECT_LE(best, (rng.rotation() - M).norm());
}

TEST(NearestRotation, ReflectionBecomesProperRotation) {
  const Mat3 R = nearest_rotation(Vec3(1, 1, -1).asDiagonal());
  EXPECT_NEAR(R.determinant(), 1.0, 1e-12);
  EXPECT_LT(orthonormality_error(R), 1e-12);
}

TEST(NearestRotation, RankDeficientThrows) {
  EXPECT_EQ(error_code_of([] { nearest_rotation(Vec3(1, 1, 0).asDiagonal()); }), ErrorCode::kRankDeficient);
}

TEST(NearestRotation, Idempotent) {
  Rng rng(15);
  for (int i = 0; i < 500; ++i) {
    const Mat3 M = rng.rotation() + 0.2 * Mat3::Random();
    const Mat3 R = nearest_rotation(M);
    EXPECT_LT((nearest_rotation(R) - R).norm(), 1e-12);
  }
}

TEST(Pose, CompositionIsAssociative) {
  Rng rng(16);
  for (int i = 0; i < 500; ++i) {
    const Pose a = rng.pose(), b = rng.pose(), c = rng.pose();
    const Pose l = (a * b) * c;
    const Pose r = a * (b * c);
    EXPECT_LT((l.matrix() - r.matrix()).norm(), 1e-12);
  }
}

TEST(Pose, InverseComposesToIdentity) {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const Pose p = rng.pose();
    EXPECT_LT(((p * p.inverse()).matrix() - Mat4::Identity()).norm(), 1e-12);
  }
}

TEST(Rotation, ExpLogRoundTrip) {
  Rng rng(18);
  for (int i = 0; i < 500; ++i) {
    const Vec3 w = rng.unit() * rng.uniform(0.0, M_PI - 1e-3);
    EXPECT_LT((rotation_log(rotation_exp(w)) - w).norm(), 1e-9);
  }
  EXPECT_LT((rotation_exp(Vec3(0, 0, 0.5)) - rot_z(0.5)).norm(), 1e-15);
  EXPECT_NEAR(rotation_geodesic(rot_x(0.1), rot_x(0.4)), 0.3, 1e-12);
}
