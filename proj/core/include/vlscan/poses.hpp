#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vlscan/camera.hpp"
#include "vlscan/scene.hpp"

namespace vlscan {

struct PoseConstraints {
  int count = 38;
  std::uint64_t seed = 1;
  double max_tilt = 1.0471975511965976;      // from fronto-parallel, radians
  double max_view_angle = 1.1344640137963142; // board normal vs. line of sight
  double max_roll = 0.5235987755982988;      // in-plane rotation about the optical axis
  double min_distance = 0.7;  // depth (camera z) of the board center
  double max_distance = 1.3;
  double margin_px = 10.0;
  // When set, the plane (camera frame) must cross the board sheet.
  std::optional<PlaneParams> laser_plane;
  int max_attempts = 200000;
};

// Tilt of a board -> camera pose: angle between the board z axis and the
// camera z axis.
double board_tilt(const Pose& board_to_camera);

// All four sheet corners project inside the image with the given margin.
bool board_in_frame(const Intrinsics& K, const CheckerboardSpec& spec, const Pose& board_to_camera,
                    double margin_px);

// Laser plane intersects the sheet.
bool plane_crosses_board(const PlaneParams& plane, const CheckerboardSpec& spec, const Pose& board_to_camera);

// Seeded random board poses in front of the camera. The board +z axis points
// away from the camera and board +x stays within max_roll of camera +x.
// Throws ConfigError when the constraints cannot be met.
std::vector<Pose> generate_poses(const Intrinsics& K, const CheckerboardSpec& spec, const PoseConstraints& c);

}  // namespace vlscan
