#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vlscan/calib.hpp"
#include "vlscan/corners.hpp"
#include "vlscan/extract.hpp"
#include "vlscan/image.hpp"
#include "vlscan/scene.hpp"

namespace vlscan {

struct BoardObservation {
  CornerDetection detection;
  LaserProfile profile;
  CalibView view;  // corner correspondences plus valid stripe pixels
};

// Detects the board in the channel least affected by the laser and extracts
// the stripe from the laser channel.
BoardObservation observe_board(const Image& rgb, const CheckerboardSpec& spec, const Vec3& laser_color, int id,
                               const CornerDetectorOptions& corner_options = {},
                               const ExtractParams& extract_params = {});

// Board pose with K and distortion held fixed: homography decomposition
// followed by reprojection-error refinement.
Pose estimate_board_pose(const CalibView& view, const Intrinsics& K, const Distortion& d, const LMOptions& lm = {});

struct LaserCalibration {
  PlaneFit fit;
  std::vector<Vec3> points;        // camera frame, on-board stripe points
  std::vector<int> view_ids;       // views that contributed points
};

// Recovers each view's board pose (unless already set), back-projects the
// stripe pixels onto the board and fits the laser plane. Pixels are
// undistorted first when d is non-zero.
LaserCalibration calibrate_laser_plane(std::vector<CalibView>& views, const Intrinsics& K, const Distortion& d,
                                       const PlaneFitOptions& options = {});

}  // namespace vlscan
