#pragma once

#include "vlscan/geom.hpp"

namespace vlscan {

// Pixel coordinates: centers at integer positions, origin at the top-left
// pixel center, u to the right and v downwards.
using Pixel = Eigen::Vector2d;

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double s = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  Mat3 matrix() const;
  // Closed-form upper-triangular inverse.
  Mat3 inverse() const;

  // Same optics on a sensor resampled by `factor` (0.5 halves the resolution).
  Intrinsics scaled(double factor) const;

  bool contains(const Pixel& px, double margin = 0.0) const {
    return px.x() >= -0.5 + margin && px.y() >= -0.5 + margin &&
           px.x() <= width - 0.5 - margin && px.y() <= height - 0.5 - margin;
  }

  void validate() const;
};

// Brown-Conrady: radial (1 + k1 r^2 + k2 r^4 + k3 r^6) plus two tangential
// terms, applied on the normalized image plane.
struct Distortion {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;

  bool is_zero() const { return k1 == 0.0 && k2 == 0.0 && k3 == 0.0 && p1 == 0.0 && p2 == 0.0; }
};

struct CameraRig {
  Intrinsics intrinsics;
  Distortion distortion;
  Pose pose_cw;  // world -> camera

  Vec3 center_world() const { return pose_cw.inverse().t; }
};

// World -> camera pose for a camera at `eye` looking at `target`; `up` maps to
// the image's upward direction (-v). Throws DegenerateConfiguration when the
// view direction is parallel to up.
Pose look_at(const Vec3& eye, const Vec3& target, const Vec3& up);

Vec2 apply_distortion(const Distortion& d, const Vec2& p_norm);

// Inverse of apply_distortion by Newton iteration. Throws NoConvergence when
// the residual is not below 1e-10 after max_iter steps.
Vec2 undistort(const Distortion& d, const Vec2& p_dist, int max_iter = 50);

// Camera-frame point to pixel. Throws BehindCamera when z <= 0.
Pixel project_camera_point(const Intrinsics& K, const Distortion& d, const Vec3& p_c);

Pixel project(const CameraRig& rig, const Vec3& p_w);

// Ray through the camera origin with v = K^-1 (u, v, 1).
Line3 unproject_to_ray(const Intrinsics& K, const Pixel& px);

// As above for distorted imagery: the pixel is undistorted first.
Line3 unproject_to_ray(const Intrinsics& K, const Distortion& d, const Pixel& px);

}  // namespace vlscan
