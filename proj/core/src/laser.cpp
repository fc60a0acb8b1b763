#include "vlscan/laser.hpp"

#include <cmath>
#include <numbers>

#include "vlscan/error.hpp"

namespace vlscan {

void LaserModel::validate() const {
  if (!(divergence_angle > 0.0 && divergence_angle < cone_angle && cone_angle < std::numbers::pi)) {
    throw Error(ErrorCode::kDomainError, "laser angles must satisfy 0 < divergence < cone < pi");
  }
  if (!(power_mw >= 0.0) || !(intensity_scale >= 0.0)) {
    throw Error(ErrorCode::kDomainError, "laser power must be non-negative");
  }
}

double LaserModel::sigma() const { return sigma_from_divergence(divergence_angle); }
double LaserModel::gamma() const { return std::tan(0.5 * cone_angle); }
double LaserModel::power_scale() const { return power_correction(sigma(), cone_angle); }

double sigma_from_divergence(double theta_l) {
  if (!(theta_l > 0.0 && theta_l < std::numbers::pi)) {
    throw Error(ErrorCode::kDomainError, "divergence angle must be in (0, pi)");
  }
  // 1/e^2 level of a unit-amplitude Gaussian.
  const double level = std::log(std::exp(-2.0));
  return std::tan(0.5 * theta_l) / std::sqrt(-2.0 * level);
}

double power_correction(double sigma, double theta_c) {
  if (!(sigma > 0.0) || !(theta_c > 0.0 && theta_c < std::numbers::pi)) {
    throw Error(ErrorCode::kDomainError, "power correction needs sigma > 0 and cone in (0, pi)");
  }
  return 4.0 * std::numbers::pi /
         (2.0 * std::tan(0.5 * theta_c) * sigma * std::sqrt(2.0 * std::numbers::pi));
}

double gaussian_mask(const LaserModel& model, const Vec3& dir_local) {
  if (!(dir_local.z() < 0.0)) {
    throw Error(ErrorCode::kOutsideHemisphere, "direction is outside the emission hemisphere");
  }
  const double inv_z = 1.0 / std::abs(dir_local.z());
  const double xp = dir_local.x() * inv_z;
  const double yp = dir_local.y() * inv_z;
  if (std::abs(yp) > model.gamma()) return 0.0;
  const double sigma = model.sigma();
  return std::exp(-(xp * xp) / (2.0 * sigma * sigma));
}

double intensity_mask(const LaserModel& model, const Vec3& dir_local) {
  return gaussian_mask(model, dir_local) * model.power_scale();
}

PlaneParams laser_plane(const LaserModel& model) {
  const Vec3 n = model.pose_wl.R.col(0).normalized();
  return PlaneParams::from_point_normal(model.pose_wl.t, n);
}

Pose laser_pose_from_beam(const Vec3& origin, const Vec3& beam_dir, const Vec3& fan_dir) {
  const Vec3 z = -beam_dir.normalized();
  Vec3 y = fan_dir - fan_dir.dot(z) * z;
  if (!(y.norm() > 1e-12)) {
    throw Error(ErrorCode::kDomainError, "fan direction is parallel to the beam");
  }
  y.normalize();
  Pose pose;
  pose.R.col(0) = y.cross(z);
  pose.R.col(1) = y;
  pose.R.col(2) = z;
  pose.t = origin;
  return pose;
}

Pose side_mounted_laser_pose(double baseline, double toe_in) {
  // R_x(pi) turns the beam to +z; R_y(-toe_in) tilts it towards -x.
  return {rot_y(-toe_in) * rot_x(std::numbers::pi), Vec3(baseline, 0.0, 0.0)};
}

}  // namespace vlscan
