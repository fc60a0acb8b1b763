#include "frames.hpp"

#include <algorithm>
#include <cstdio>

#include "vlscan/error.hpp"

namespace vlscan::app {

Json sidecar_json(const Sidecar& s, const Json& laser, const std::string& passes, int spp) {
  Json j;
  j["frame"] = s.frame;
  j["seed"] = s.seed;
  j["spp"] = spp;
  j["passes"] = passes;
  j["distorted"] = s.distorted;
  j["intrinsics"] = to_json(s.intrinsics);
  j["K"] = to_json(s.intrinsics.matrix());
  j["distortion"] = to_json(s.distortion);
  j["T_cw"] = to_json(s.T_cw.matrix());
  j["laser"] = laser;
  j["laser_plane_camera"] = to_json(s.laser_plane_camera);
  if (s.board && s.board_to_camera) {
    j["checkerboard"] = {{"spec", to_json(*s.board)}, {"board_to_camera", to_json(s.board_to_camera->matrix())}};
  }
  return j;
}

Sidecar read_sidecar(const std::filesystem::path& path) {
  const Json j = load_json(path);
  Sidecar s;
  try {
    s.frame = j.at("frame").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.distorted = j.value("distorted", false);
    ObjectReader k(j.at("intrinsics"), "/intrinsics");
    s.intrinsics = intrinsics_from(k);
    s.distortion = distortion_from(ObjectReader(j.at("distortion"), "/distortion"));
    const Mat4 T = mat4_from(j.at("T_cw"), "/T_cw");
    s.T_cw = {T.topLeftCorner<3, 3>(), T.topRightCorner<3, 1>()};
    s.laser_color = vec3_from(j.at("laser").at("color"), "/laser/color");
    s.laser_plane_camera = plane_from(j.at("laser_plane_camera"), "/laser_plane_camera");
    if (j.contains("checkerboard")) {
      s.board = checkerboard_from(ObjectReader(j.at("checkerboard").at("spec"), "/checkerboard/spec"));
      const Mat4 B = mat4_from(j.at("checkerboard").at("board_to_camera"), "/checkerboard/board_to_camera");
      s.board_to_camera = Pose{B.topLeftCorner<3, 3>(), B.topRightCorner<3, 1>()};
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIoError, path.string() + ": malformed sidecar: " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kIoError, path.string() + ": malformed sidecar: " + e.what());
  }
  return s;
}

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04d", index);
  return buf;
}

std::vector<FrameDir> find_frames(const std::filesystem::path& input) {
  std::vector<FrameDir> out;
  if (std::filesystem::exists(input / "sidecar.json")) {
    out.push_back({input, read_sidecar(input / "sidecar.json")});
    return out;
  }
  if (!std::filesystem::is_directory(input)) {
    throw Error(ErrorCode::kIoError, input.string() + ": not a directory");
  }
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(input)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("frame_", 0) == 0 &&
        std::filesystem::exists(entry.path() / "sidecar.json")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) out.push_back({d, read_sidecar(d / "sidecar.json")});
  if (out.empty()) throw Error(ErrorCode::kIoError, input.string() + ": no frame directories found");
  return out;
}

}  // namespace vlscan::app
