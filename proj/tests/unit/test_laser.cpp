#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vlscan/error.hpp"
#include "vlscan/laser.hpp"
#include "vlscan/scenarios.hpp"

using namespace vlscan;
using vlscan::test::mask_integral;
using vlscan::test::model_with;
using vlscan::test::Rng;


TEST(SigmaFromDivergence, RightAngle) {
  EXPECT_NEAR(sigma_from_divergence(M_PI / 2), 0.5, 1e-15);
}

TEST(SigmaFromDivergence, BothFormsAgree) {
  for (double t : {1e-4, 0.004, 0.1, 1.0, 2.5}) {
    const double a = std::tan(t / 2) / std::sqrt(-2.0 * std::log(std::exp(-2.0)));
    EXPECT_NEAR(sigma_from_divergence(t), a, 1e-15);
    EXPECT_NEAR(sigma_from_divergence(t), std::tan(t / 2) / 2, 1e-15);
  }
}

TEST(SigmaFromDivergence, SmallAngleLimit) {
  // tan(t/2)/2 = t/4 (1 + t^2/12 + O(t^4))
  for (double t : {0.01, 1e-3, 1e-5}) {
    EXPECT_NEAR(sigma_from_divergence(t) / (t / 4), 1.0 + t * t / 12, 1e-9);
  }
  double prev = sigma_from_divergence(1e-3);
  for (double t = 5e-4; t > 1e-8; t /= 2) {
    const double s = sigma_from_divergence(t);
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(SigmaFromDivergence, DomainErrors) {
  EXPECT_THROW(sigma_from_divergence(0.0), Error);
  EXPECT_THROW(sigma_from_divergence(M_PI), Error);
}

TEST(PowerCorrection, Arithmetic) {
  EXPECT_NEAR(power_correction(0.5, M_PI / 2), 4 * M_PI / (2 * 1 * 0.5 * std::sqrt(2 * M_PI)), 1e-12);
  EXPECT_NEAR(power_correction(0.5, M_PI / 2), 5.01326, 1e-5);
  EXPECT_NEAR(power_correction(0.02, 1.0), 2.0 * power_correction(0.04, 1.0), 1e-12);
  EXPECT_THROW(power_correction(0.0, 1.0), Error);
  EXPECT_THROW(power_correction(0.1, M_PI), Error);
}

TEST(PowerCorrection, QuadratureGivesFullSphere) {
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const double sigma = rng.uniform(0.001, 0.05);
    const double theta_c = rng.uniform(30.0, 120.0) * M_PI / 180.0;
    const double integral = mask_integral(model_with(sigma, theta_c));
    EXPECT_NEAR(integral / (4 * M_PI), 1.0, 0.01) << "sigma " << sigma << " cone " << theta_c;
  }
}

TEST(IntensityMask, Examples) {
  const LaserModel m = model_with(0.01, 1.0);
  const double lambda = m.power_scale();
  EXPECT_DOUBLE_EQ(intensity_mask(m, Vec3(0, 0, -1)), lambda);
  EXPECT_NEAR(intensity_mask(m, Vec3(m.sigma(), 0, -1)), lambda * std::exp(-0.5), 1e-12 * lambda);
  EXPECT_EQ(intensity_mask(m, Vec3(0, 1.01 * m.gamma(), -1)), 0.0);
  // Projection divides by |z|, so the direction's length does not matter.
  EXPECT_NEAR(intensity_mask(m, Vec3(0.5 * m.sigma(), 0.1, -0.5)), intensity_mask(m, Vec3(m.sigma(), 0.2, -1)),
              1e-12 * lambda);
}

TEST(IntensityMask, OutsideHemisphereThrows) {
  const LaserModel m;
  try {
    intensity_mask(m, Vec3(0, 0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutsideHemisphere);
  }
}

TEST(IntensityMask, SymmetricAndNonNegative) {
  Rng rng(32);
  const LaserModel m;
  for (int i = 0; i < 5000; ++i) {
    const Vec3 d(rng.uniform(-0.05, 0.05), rng.uniform(-1.5, 1.5), -rng.uniform(0.1, 1.0));
    const double a = intensity_mask(m, d);
    EXPECT_GE(a, 0.0);
    EXPECT_NEAR(a, intensity_mask(m, Vec3(-d.x(), d.y(), d.z())), 1e-15 * m.power_scale());
    if (std::abs(d.y() / d.z()) > m.gamma()) EXPECT_EQ(a, 0.0);
  }
}

TEST(LaserModel, ValidateOrdering) {
  LaserModel m;
  EXPECT_NO_THROW(m.validate());
  m.divergence_angle = m.cone_angle;
  EXPECT_THROW(m.validate(), Error);
}

TEST(LaserPlane, IdentityPose) {
  const PlaneParams p = laser_plane(LaserModel{});
  EXPECT_LT((p.vector() - Vec4(1, 0, 0, 0)).norm(), 1e-15);
}

TEST(LaserPlane, ReferenceMountMatchesPublishedPlane) {
  const PlaneParams p = laser_plane(reference_laser());
  const Vec4 published(0.9744, -6.706e-8, 0.2249, -0.1949);
  EXPECT_LT((p.vector() - published).cwiseAbs().maxCoeff(), 5e-4);
  const double c = std::cos(13.0 * M_PI / 180.0), s = std::sin(13.0 * M_PI / 180.0);
  EXPECT_LT((p.vector() - Vec4(c, 0.0, s, -0.2 * c)).norm(), 1e-12);
}

TEST(LaserPlane, InvariantUnderMotionWithinFanPlane) {
  Rng rng(33);
  LaserModel m = reference_laser();
  const PlaneParams p = laser_plane(m);
  for (int i = 0; i < 100; ++i) {
    LaserModel moved = m;
    const Vec3 local(0.0, rng.uniform(-1, 1), rng.uniform(-1, 1));
    moved.pose_wl.t += m.pose_wl.R * local;
    moved.pose_wl.R = m.pose_wl.R * rot_x(rng.uniform(-1, 1));
    const PlaneParams q = laser_plane(moved);
    EXPECT_LT((p.vector() - q.vector()).norm(), 1e-12);
    EXPECT_NEAR(q.normal().norm(), 1.0, 1e-12);
    EXPECT_LT(std::abs(q.evaluate(moved.origin())), 1e-12);
  }
}

TEST(LaserPose, FromBeamDirections) {
  const Pose p = laser_pose_from_beam(Vec3(1, 2, 3), Vec3(0, 0, 1), Vec3(0, 1, 0.3));
  EXPECT_LT((p.R * Vec3(0, 0, -1) - Vec3(0, 0, 1)).norm(), 1e-12);
  EXPECT_LT(std::abs((p.R * Vec3::UnitY()).z()), 1e-12);
  EXPECT_NEAR(p.R.determinant(), 1.0, 1e-12);
}
