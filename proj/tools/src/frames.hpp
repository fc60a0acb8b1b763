#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "json_io.hpp"
#include "vlscan/camera.hpp"
#include "vlscan/scene.hpp"

namespace vlscan::app {

// Ground-truth bundle written next to each rendered frame.
struct Sidecar {
  int frame = 0;
  std::uint64_t seed = 0;
  Intrinsics intrinsics;
  Distortion distortion;
  bool distorted = false;
  Pose T_cw;
  Vec3 laser_color{0.0, 0.2, 1.0};
  PlaneParams laser_plane_camera;
  std::optional<CheckerboardSpec> board;
  std::optional<Pose> board_to_camera;
};

Json sidecar_json(const Sidecar& s, const Json& laser, const std::string& passes, int spp);
Sidecar read_sidecar(const std::filesystem::path& path);

struct FrameDir {
  std::filesystem::path dir;
  Sidecar sidecar;
};

std::string frame_name(int index);

// A frame directory itself, or every frame_* directory below `input`, sorted
// by name. Throws IoError when none is found.
std::vector<FrameDir> find_frames(const std::filesystem::path& input);

}  // namespace vlscan::app
