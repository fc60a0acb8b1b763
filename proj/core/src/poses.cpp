#include "vlscan/poses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "vlscan/error.hpp"

namespace vlscan {

namespace {

std::array<Vec3, 4> sheet_corners(const CheckerboardSpec& spec, const Pose& pose) {
  const double hw = 0.5 * spec.sheet_w;
  const double hh = 0.5 * spec.sheet_h;
  return {pose.apply(Vec3(-hw, -hh, 0)), pose.apply(Vec3(hw, -hh, 0)), pose.apply(Vec3(hw, hh, 0)),
          pose.apply(Vec3(-hw, hh, 0))};
}

}  // namespace

double board_tilt(const Pose& board_to_camera) {
  return std::acos(std::clamp(board_to_camera.R(2, 2), -1.0, 1.0));
}

bool board_in_frame(const Intrinsics& K, const CheckerboardSpec& spec, const Pose& pose, double margin_px) {
  for (const Vec3& c : sheet_corners(spec, pose)) {
    if (!(c.z() > 0.0)) return false;
    const Pixel px = project_camera_point(K, Distortion{}, c);
    if (!K.contains(px, margin_px)) return false;
  }
  return true;
}

bool plane_crosses_board(const PlaneParams& plane, const CheckerboardSpec& spec, const Pose& pose) {
  bool pos = false;
  bool neg = false;
  for (const Vec3& c : sheet_corners(spec, pose)) {
    const double s = plane.evaluate(c);
    pos |= s > 0.0;
    neg |= s < 0.0;
  }
  return pos && neg;
}

std::vector<Pose> generate_poses(const Intrinsics& K, const CheckerboardSpec& spec, const PoseConstraints& c) {
  if (c.count < 0 || !(c.min_distance > 0.0) || c.max_distance < c.min_distance) {
    throw Error(ErrorCode::kConfigError, "invalid pose constraints");
  }
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Mat3 Ki = K.inverse();
  std::vector<Pose> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < c.count) {
    if (++attempts > c.max_attempts) {
      throw Error(ErrorCode::kConfigError, "could not place " + std::to_string(c.count) + " boards after " +
                                               std::to_string(c.max_attempts) + " attempts");
    }
    const double axis = 2.0 * std::numbers::pi * unit(rng);
    const double tilt = c.max_tilt * std::sqrt(unit(rng));
    const double roll = c.max_roll * (2.0 * unit(rng) - 1.0);
    const double dist = c.min_distance + (c.max_distance - c.min_distance) * unit(rng);
    const double u = K.width * (0.3 + 0.4 * unit(rng));
    const double v = K.height * (0.3 + 0.4 * unit(rng));
    Pose pose;
    pose.R = rotation_exp(tilt * Vec3(std::cos(axis), std::sin(axis), 0.0)) * rot_z(roll);
    const Vec3 ray = Ki * Vec3(u, v, 1.0);
    pose.t = dist * ray / ray.z();

    const Vec3 sight = pose.t.normalized();
    if (std::acos(std::clamp(pose.R.col(2).dot(sight), -1.0, 1.0)) > c.max_view_angle) continue;
    if (!board_in_frame(K, spec, pose, c.margin_px)) continue;
    if (c.laser_plane && !plane_crosses_board(*c.laser_plane, spec, pose)) continue;
    out.push_back(pose);
  }
  return out;
}

}  // namespace vlscan
