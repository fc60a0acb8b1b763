#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vlscan/camera.hpp"
#include "vlscan/geom.hpp"
#include "vlscan/lm.hpp"

namespace vlscan {

// Image point and its board-plane position (board z = 0 implicit).
struct Correspondence2D3D {
  Pixel image;
  Vec2 world;
};

// Board plane -> image. Stored with |H|_F = 1 and H(2,2) >= 0.
struct Homography {
  Mat3 H = Mat3::Identity();

  static Homography normalized(const Mat3& M);
  Pixel map(const Vec2& world) const;
  Vec2 inverse_map(const Pixel& image) const;
};

// Euclidean transfer error |image - H world| per correspondence.
std::vector<double> transfer_errors(const Homography& H, std::span<const Correspondence2D3D> corrs);
double max_transfer_error(const Homography& H, std::span<const Correspondence2D3D> corrs);

// DLT with Hartley normalization of both point sets. Throws
// DegenerateConfiguration on fewer than four points or collinear layouts.
Homography estimate_homography_dlt(std::span<const Correspondence2D3D> corrs);

struct HomographyRefinement {
  Homography homography;
  LMReport report;
  bool converged = false;
};

// Transfer residuals (u, v per correspondence) over the nine entries of H,
// row-major. The correspondences must outlive the problem.
LeastSquaresProblem homography_problem(std::span<const Correspondence2D3D> corrs);

// Minimizes the summed squared transfer error over the nine entries of H.
HomographyRefinement refine_homography(const Homography& H0, std::span<const Correspondence2D3D> corrs,
                                       const LMOptions& options = {});

// H = K [r1 r2 t], normalized.
Homography homography_from_pose(const Pose& board_to_camera, const Intrinsics& K);

// r1 = l K^-1 h1, r2 = l K^-1 h2, r3 = r1 x r2, t = l K^-1 h3 with
// l = 1 / |K^-1 h1|, then projected onto SO(3). The sign of l is chosen so the
// board lies in front of the camera; CheiralityError if that is impossible.
Pose pose_from_homography(const Homography& H, const Intrinsics& K);

struct CalibView {
  int id = 0;
  std::vector<Correspondence2D3D> correspondences;
  std::vector<Pixel> laser_pixels;
  std::optional<Homography> homography;
  std::optional<Pose> pose;                 // board -> camera
  std::optional<Vec2> board_half_extent;    // sheet half width / height, meters
};

struct ZhangOptions {
  bool zero_skew = true;
  bool estimate_distortion = false;
  bool refine = true;
  LMOptions lm{};
};

struct CameraCalibration {
  Intrinsics intrinsics;
  Distortion distortion;
  Intrinsics closed_form;      // before bundle refinement
  std::vector<Pose> poses;     // board -> camera, one per view
  std::vector<double> view_rms_px;
  double rms_px = 0.0;
  LMReport report;
};

// Closed-form intrinsics from the absolute-conic constraints of each
// homography. Throws InsufficientViews below three views and
// DegenerateMotion when the constraint system is rank deficient.
Intrinsics zhang_closed_form(std::span<const Homography> homographies, int width, int height,
                             bool zero_skew = true);

// Full planar calibration: per-view DLT + refinement, closed form, then a
// bundle adjustment of intrinsics (and optionally distortion) and all board
// poses on the reprojection error.
CameraCalibration zhang_intrinsics(std::span<const CalibView> views, int width, int height,
                                   const ZhangOptions& options = {});

double reprojection_rms(const Intrinsics& K, const Distortion& d, const Pose& pose,
                        std::span<const Correspondence2D3D> corrs);

struct BackprojectedPoint {
  Vec3 point;      // camera frame
  bool on_board;   // inside the board extent when it is known
};

// Laser pixels of a view mapped through H^-1 onto the board and into the
// camera frame with the view pose. Throws MissingLaserPixels.
std::vector<BackprojectedPoint> backproject_laser_pixels(const CalibView& view, const Intrinsics& K);

struct PlaneFitOptions {
  LMOptions lm{};
  double penalty_weight = 1.0;  // weight of (|n| - 1)^2
  bool refine = true;
};

struct PlaneFit {
  PlaneParams plane;      // unit normal, d <= 0
  PlaneParams initial;    // homogeneous SVD solution, unit normal
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double mean_abs_distance = 0.0;
  double rms_distance = 0.0;
  double max_abs_distance = 0.0;
  std::size_t point_count = 0;
  LMReport report;
};

// Summed squared point-wise error  |p . phi| / |n| + w (|n| - 1)^2.
double laser_plane_cost(const PlaneParams& plane, std::span<const Vec3> points, double penalty_weight = 1.0);

// Per-point errors above over phi = (a, b, c, d). The points must outlive the
// problem.
LeastSquaresProblem laser_plane_problem(std::span<const Vec3> points, double penalty_weight = 1.0);

// Homogeneous [x y z 1] phi = 0 system solved by SVD, then refined with LM on
// the error above. Throws CollinearPoints.
PlaneFit fit_laser_plane(std::span<const Vec3> points, const PlaneFitOptions& options = {});

// Angle between plane normals, ignoring orientation.
double normal_angle(const PlaneParams& a, const PlaneParams& b);

}  // namespace vlscan
