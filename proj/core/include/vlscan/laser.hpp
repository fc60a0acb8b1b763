#pragma once

#include "vlscan/geom.hpp"

namespace vlscan {

// Line laser. In the laser frame the beam leaves along -z and the fan spreads
// along y, so the laser plane is the local y-z plane.
struct LaserModel {
  Pose pose_wl;                        // laser -> world
  Vec3 color{0.0, 0.2, 1.0};           // emission color, unit range
  double power_mw = 20.0;
  double divergence_angle = 0.004;     // full angle at 1/e^2, radians
  double cone_angle = 1.0471975511965976;  // full fan angle, radians
  // Irradiance units per mW of a unit-mask direction at 1 m.
  double intensity_scale = 1e-4;

  // Throws DomainError unless 0 < divergence < cone < pi.
  void validate() const;

  double sigma() const;       // Gaussian width on the z = 1 projection plane
  double gamma() const;       // tan(cone/2): half length of the fan on z = 1
  double power_scale() const; // power_correction(sigma, cone)
  Vec3 origin() const { return pose_wl.t; }
};

// sigma = tan(theta_l / 2) / sqrt(-2 ln(e^-2)).
double sigma_from_divergence(double theta_l);

// 4 pi / (2 tan(theta_c / 2) sigma sqrt(2 pi)).
double power_correction(double sigma, double theta_c);

// Gaussian cross-section exp(-x_p^2 / (2 sigma^2)) without power scaling,
// zero outside the fan. dir_local must point into the emission hemisphere.
double gaussian_mask(const LaserModel& model, const Vec3& dir_local);

// Power-corrected mask: gaussian_mask * power_correction.
double intensity_mask(const LaserModel& model, const Vec3& dir_local);

// Plane through the laser origin whose normal is the laser x axis in world.
PlaneParams laser_plane(const LaserModel& model);

// Laser frame with the beam along `beam_dir` and the fan along `fan_dir`
// (orthogonalized against the beam).
Pose laser_pose_from_beam(const Vec3& origin, const Vec3& beam_dir, const Vec3& fan_dir);

// Laser offset by `baseline` along the camera x axis, aimed along the camera
// z axis and rotated by `toe_in` about y towards the optical axis.
Pose side_mounted_laser_pose(double baseline, double toe_in);

}  // namespace vlscan
