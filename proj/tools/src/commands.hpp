#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vlscan::app {

struct RenderArgs {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<int> threads;
  std::optional<std::string> passes;
  bool distort = false;
};

struct PosesArgs {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<int> count;
  std::filesystem::path out = "poses.json";
};

struct CalibrateCameraArgs {
  std::filesystem::path input;
  std::filesystem::path out = "calibration.json";
  bool estimate_distortion = false;
  bool estimate_skew = false;
};

struct CalibrateLaserArgs {
  std::filesystem::path input;
  std::filesystem::path calibration;
  std::filesystem::path out = "plane.json";
};

struct ExtractArgs {
  std::filesystem::path input;
  std::string methods = "rgb";
  std::optional<std::filesystem::path> out;  // directory; defaults to each frame directory
  bool transpose = false;
};

struct ReconstructArgs {
  std::filesystem::path input;
  std::optional<std::filesystem::path> plane;
  std::optional<std::filesystem::path> calibration;
  std::string method = "rgb";
  std::filesystem::path out = "cloud.ply";
};

struct EvaluateArgs {
  std::filesystem::path input;
  std::string methods = "rgb,mask,gt";
  std::optional<std::filesystem::path> plane;
  std::optional<std::filesystem::path> calibration;
  std::filesystem::path out = "evaluation";
};

struct ScanArgs {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<int> threads;
  std::optional<std::filesystem::path> plane;
};

// Each returns normally on success and throws vlscan::Error otherwise.
void cmd_render(const RenderArgs& args);
void cmd_poses(const PosesArgs& args);
void cmd_calibrate_camera(const CalibrateCameraArgs& args);
void cmd_calibrate_laser(const CalibrateLaserArgs& args);
void cmd_extract(const ExtractArgs& args);
void cmd_reconstruct(const ReconstructArgs& args);
void cmd_evaluate(const EvaluateArgs& args);
void cmd_scan(const ScanArgs& args);

// Exit status for an error code: 2 config, 3 I/O, 4 numerical.
int exit_code_for(int error_code);

}  // namespace vlscan::app
