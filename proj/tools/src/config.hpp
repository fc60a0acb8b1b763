#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json_io.hpp"
#include "vlscan/poses.hpp"
#include "vlscan/render.hpp"
#include "vlscan/scene.hpp"

namespace vlscan::app {

enum class SweepMode { kNone, kTranslate, kBoardPoses };

struct SweepConfig {
  SweepMode mode = SweepMode::kNone;
  int count = 1;
  Vec3 axis = Vec3::UnitX();      // translate: world direction of rig motion
  double step = 0.005;            // translate: meters per frame
  CheckerboardSpec board;         // board_poses
  Vec3 board_albedo{0.8, 0.8, 0.8};
  PoseConstraints constraints;    // board_poses
  bool require_laser = true;      // board_poses: board must intersect the laser plane
};

// Parsed scan configuration. `scene` holds the static objects, lights,
// camera and laser of frame 0.
struct ScanConfig {
  Scene scene;
  RenderOptions render;
  SweepConfig sweep;
  std::filesystem::path output_dir = "out";
  bool png = true;
};

ScanConfig parse_config(const Json& j, const std::filesystem::path& base_dir);
ScanConfig load_config(const std::filesystem::path& path);

struct FrameSetup {
  int index = 0;
  Scene scene;
  Pose camera_to_world;
  std::optional<Pose> board_to_camera;
};

std::vector<FrameSetup> build_frames(const ScanConfig& config);

// Board poses for a board_poses sweep (camera frame).
std::vector<Pose> sweep_board_poses(const ScanConfig& config);

std::string pass_names(unsigned passes);
unsigned parse_passes(const std::string& list);

}  // namespace vlscan::app
