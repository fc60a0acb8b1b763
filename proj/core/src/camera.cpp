#include "vlscan/camera.hpp"

#include <cmath>
#include <string>

#include "vlscan/error.hpp"

namespace vlscan {

Mat3 Intrinsics::matrix() const {
  Mat3 K;
  K << fx, s, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return K;
}

Mat3 Intrinsics::inverse() const {
  Mat3 Ki;
  Ki << 1.0 / fx, -s / (fx * fy), cy * s / (fx * fy) - cx / fx,  //
      0.0, 1.0 / fy, -cy / fy,                                   //
      0.0, 0.0, 1.0;
  return Ki;
}

Intrinsics Intrinsics::scaled(double factor) const {
  // Plain scaling of K; keeps the (width/2, height/2) principal point
  // convention of the full-size sensor.
  Intrinsics out = *this;
  out.fx = fx * factor;
  out.fy = fy * factor;
  out.s = s * factor;
  out.cx = cx * factor;
  out.cy = cy * factor;
  out.width = static_cast<int>(std::lround(width * factor));
  out.height = static_cast<int>(std::lround(height * factor));
  return out;
}

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kConfigError, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kConfigError,
                "image size must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

Vec2 apply_distortion(const Distortion& d, const Vec2& p) {
  const double x = p.x();
  const double y = p.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + r2 * (d.k1 + r2 * (d.k2 + r2 * d.k3));
  return {x * radial + 2.0 * d.p1 * x * y + d.p2 * (r2 + 2.0 * x * x),
          y * radial + d.p1 * (r2 + 2.0 * y * y) + 2.0 * d.p2 * x * y};
}

namespace {

Eigen::Matrix2d distortion_jacobian(const Distortion& d, const Vec2& p) {
  const double x = p.x();
  const double y = p.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + r2 * (d.k1 + r2 * (d.k2 + r2 * d.k3));
  // d(radial)/d(r2)
  const double dradial = d.k1 + r2 * (2.0 * d.k2 + 3.0 * d.k3 * r2);
  Eigen::Matrix2d J;
  J(0, 0) = radial + x * dradial * 2.0 * x + 2.0 * d.p1 * y + d.p2 * 6.0 * x;
  J(0, 1) = x * dradial * 2.0 * y + 2.0 * d.p1 * x + d.p2 * 2.0 * y;
  J(1, 0) = y * dradial * 2.0 * x + d.p1 * 2.0 * x + 2.0 * d.p2 * y;
  J(1, 1) = radial + y * dradial * 2.0 * y + d.p1 * 6.0 * y + 2.0 * d.p2 * x;
  return J;
}

}  // namespace

Vec2 undistort(const Distortion& d, const Vec2& target, int max_iter) {
  if (d.is_zero()) return target;
  Vec2 p = target;
  for (int i = 0; i < max_iter; ++i) {
    const Vec2 r = apply_distortion(d, p) - target;
    if (r.norm() < 1e-14) return p;
    p -= distortion_jacobian(d, p).partialPivLu().solve(r);
    if (!p.allFinite()) break;
  }
  if (p.allFinite() && (apply_distortion(d, p) - target).norm() < 1e-10) return p;
  throw Error(ErrorCode::kNoConvergence, "undistortion did not converge");
}

Pixel project_camera_point(const Intrinsics& K, const Distortion& d, const Vec3& p_c) {
  if (!(p_c.z() > 0.0)) {
    throw Error(ErrorCode::kBehindCamera, "point is not in front of the camera");
  }
  const Vec2 n = apply_distortion(d, Vec2(p_c.x() / p_c.z(), p_c.y() / p_c.z()));
  return {K.fx * n.x() + K.s * n.y() + K.cx, K.fy * n.y() + K.cy};
}

Pixel project(const CameraRig& rig, const Vec3& p_w) {
  return project_camera_point(rig.intrinsics, rig.distortion, rig.pose_cw.apply(p_w));
}

Line3 unproject_to_ray(const Intrinsics& K, const Pixel& px) {
  return {Vec3::Zero(), K.inverse() * Vec3(px.x(), px.y(), 1.0)};
}

Line3 unproject_to_ray(const Intrinsics& K, const Distortion& d, const Pixel& px) {
  const Vec3 n = K.inverse() * Vec3(px.x(), px.y(), 1.0);
  const Vec2 u = undistort(d, n.head<2>());
  return {Vec3::Zero(), Vec3(u.x(), u.y(), 1.0)};
}

}  // namespace vlscan

namespace vlscan {

Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 z = target - eye;
  const Vec3 x = z.cross(up);
  if (!(z.norm() > 0.0) || !(x.norm() > 1e-12 * z.norm() * up.norm())) {
    throw Error(ErrorCode::kDegenerateConfiguration, "look_at direction is parallel to up");
  }
  Mat3 R_wc;  // camera -> world, columns are the camera axes
  R_wc.col(2) = z.normalized();
  R_wc.col(0) = x.normalized();
  R_wc.col(1) = R_wc.col(2).cross(R_wc.col(0));
  return Pose{R_wc, eye}.inverse();
}

}  // namespace vlscan
