#include "vlscan/pipeline.hpp"

#include <algorithm>

#include "vlscan/error.hpp"
#include "vlscan/imgproc.hpp"

namespace vlscan {

BoardObservation observe_board(const Image& rgb, const CheckerboardSpec& spec, const Vec3& laser_color, int id,
                               const CornerDetectorOptions& corner_options, const ExtractParams& extract_params) {
  BoardObservation obs;
  obs.view.id = id;
  obs.view.board_half_extent = Vec2(0.5 * spec.sheet_w, 0.5 * spec.sheet_h);
  const Image gray = extract_channel(rgb, detection_channel(laser_color));
  obs.detection = detect_checkerboard(gray, spec, corner_options);
  if (obs.detection.found) {
    const auto board = checkerboard_corners(spec);
    for (std::size_t i = 0; i < board.size(); ++i) {
      obs.view.correspondences.push_back({obs.detection.corners[i], board[i].head<2>()});
    }
  }
  obs.profile = extract_profile(rgb, dominant_channel(laser_color), extract_params);
  for (const ProfileRow& r : obs.profile.rows) {
    if (r.valid()) obs.view.laser_pixels.push_back(obs.profile.pixel(r));
  }
  return obs;
}

Pose estimate_board_pose(const CalibView& view, const Intrinsics& K, const Distortion& d, const LMOptions& lm) {
  const Homography h0 = estimate_homography_dlt(view.correspondences);
  const Homography h = refine_homography(h0, view.correspondences, lm).homography;
  const Pose initial = pose_from_homography(h, K);
  const auto& corrs = view.correspondences;
  const int n = static_cast<int>(corrs.size());
  ResidualFn residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    const Mat3 R = rotation_exp(x.head<3>());
    const Vec3 t = x.tail<3>();
    r.resize(2 * n);
    for (int i = 0; i < n; ++i) {
      Vec3 pc = R.col(0) * corrs[i].world.x() + R.col(1) * corrs[i].world.y() + t;
      pc.z() = std::max(pc.z(), 1e-9);
      const Vec2 q = apply_distortion(d, pc.head<2>() / pc.z());
      r(2 * i) = K.fx * q.x() + K.s * q.y() + K.cx - corrs[i].image.x();
      r(2 * i + 1) = K.fy * q.y() + K.cy - corrs[i].image.y();
    }
  };
  Eigen::VectorXd x0(6);
  x0 << rotation_log(initial.R), initial.t;
  const LMResult res = lm_solve(residual, nullptr, x0, lm);
  return {rotation_exp(res.x.head<3>()), res.x.tail<3>()};
}

LaserCalibration calibrate_laser_plane(std::vector<CalibView>& views, const Intrinsics& K, const Distortion& d,
                                       const PlaneFitOptions& options) {
  LaserCalibration out;
  for (CalibView& view : views) {
    if (view.laser_pixels.empty() || view.correspondences.size() < 4) continue;
    if (!view.pose) view.pose = estimate_board_pose(view, K, d);
    view.homography = homography_from_pose(*view.pose, K);
    CalibView ideal = view;
    if (!d.is_zero()) {
      const Mat3 Ki = K.inverse();
      for (Pixel& px : ideal.laser_pixels) {
        const Vec3 n = Ki * Vec3(px.x(), px.y(), 1.0);
        const Vec2 u = undistort(d, n.head<2>());
        px = Pixel(K.fx * u.x() + K.s * u.y() + K.cx, K.fy * u.y() + K.cy);
      }
    }
    bool used = false;
    for (const BackprojectedPoint& p : backproject_laser_pixels(ideal, K)) {
      if (!p.on_board) continue;
      out.points.push_back(p.point);
      used = true;
    }
    if (used) out.view_ids.push_back(view.id);
  }
  if (out.points.size() < 3) {
    throw Error(ErrorCode::kMissingLaserPixels, "no stripe pixels fall on any calibration board");
  }
  out.fit = fit_laser_plane(out.points, options);
  return out;
}

}  // namespace vlscan
