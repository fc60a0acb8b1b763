#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "commands.hpp"
#include "config.hpp"
#include "frames.hpp"
#include "test_support.hpp"
#include "vlscan/error.hpp"
#include "vlscan/io.hpp"

using namespace vlscan;
using namespace vlscan::app;
using vlscan::test::error_code_of;
namespace fs = std::filesystem;

namespace {

const char* kTinySweep = R"({
  "camera": {"intrinsics": {"fx": 100, "fy": 100, "cx": 40, "cy": 30, "width": 80, "height": 60}},
  "scene": {"objects": [{"type": "plane", "width": 1.5, "pose": {"t": [0, 0, 1]}}]},
  "render": {"spp": 2, "seed": 3},
  "sweep": {"mode": "translate", "count": 10, "axis": [1, 0, 0], "step": 0.01}
})";

// Narrow sensor with a long focal length, so the stripe is wide enough for the mask ground truth.
const char* kNarrowSweep = R"({
  "camera": {"intrinsics": {"fx": 1700, "fy": 1700, "cx": 120, "cy": 40, "width": 240, "height": 80}},
  "scene": {"objects": [{"type": "plane", "width": 1.5, "pose": {"t": [0, 0, 1]}}]},
  "render": {"spp": 4, "seed": 3},
  "sweep": {"mode": "translate", "count": 3, "axis": [1, 0, 0], "step": 0.01}
})";

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  write_text(dir / name, text);
  return dir / name;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

struct RunResult {
  int status = -1;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(VLSCAN_CLI) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                          err.string();
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = read_text(err);
  return r;
}

}  // namespace

TEST(Config, UnknownKeyReportsItsPath) {
  const auto dir = test::temp_dir("cli_unknown");
  const auto cfg = write_config(dir, "c.json", R"({"camera": {"bogus": 1}})");
  const std::string msg = message_of([&] { load_config(cfg); });
  EXPECT_NE(msg.find("ConfigError"), std::string::npos) << msg;
  EXPECT_NE(msg.find("/camera/bogus"), std::string::npos) << msg;
  EXPECT_NE(msg.find("c.json"), std::string::npos) << msg;
}

TEST(Config, BadValueReportsItsPath) {
  const auto dir = test::temp_dir("cli_badvalue");
  const auto cfg = write_config(
      dir, "c.json", R"({"scene": {"objects": [{"type": "plane", "width": 1}]}, "render": {"spp": 0}})");
  const std::string msg = message_of([&] { load_config(cfg); });
  EXPECT_NE(msg.find("/render/spp"), std::string::npos) << msg;
  const auto empty = write_config(dir, "e.json", "{}");
  EXPECT_NE(message_of([&] { load_config(empty); }).find("/scene/objects"), std::string::npos);
}

TEST(Config, InvalidJsonReportsLineAndColumn) {
  const auto dir = test::temp_dir("cli_json");
  const auto cfg = write_config(dir, "c.json", "{\n  \"camera\": ,\n}\n");
  EXPECT_EQ(error_code_of([&] { load_config(cfg); }), ErrorCode::kConfigError);
  const std::string msg = message_of([&] { load_config(cfg); });
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_EQ(error_code_of([] { load_config("/nonexistent/vlscan.json"); }), ErrorCode::kIoError);
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"plane.json", "sweep.json", "calibration.json", "v_groove.json"}) {
    const ScanConfig c = load_config(fs::path(VLSCAN_CONFIG_DIR) / name);
    EXPECT_FALSE(build_frames(c).empty()) << name;
  }
}

TEST(ParsePasses, NamesAndErrors) {
  EXPECT_EQ(parse_passes("rgb"), kPassRgb);
  EXPECT_EQ(parse_passes("rgb,depth"), kPassRgb | kPassDepth);
  EXPECT_EQ(parse_passes("mask,normals"), kPassMask | kPassNormals);
  EXPECT_EQ(parse_passes("all"), kPassAll);
  EXPECT_EQ(parse_passes(pass_names(kPassDepth | kPassMask)), kPassDepth | kPassMask);
  EXPECT_EQ(error_code_of([] { parse_passes("rgb,bogus"); }), ErrorCode::kConfigError);
  EXPECT_EQ(error_code_of([] { parse_passes(""); }), ErrorCode::kConfigError);
}

TEST(Render, TranslateSweepWritesTenFrames) {
  const auto dir = test::temp_dir("cli_sweep");
  RenderArgs args;
  args.config = write_config(dir, "c.json", kTinySweep);
  args.out = dir / "out";
  cmd_render(args);
  for (int i = 0; i < 10; ++i) {
    const fs::path f = dir / "out" / frame_name(i);
    for (const char* file : {"rgb.pfm", "rgb.png", "depth.pfm", "normals.pfm", "mask.pfm", "sidecar.json"}) {
      EXPECT_TRUE(fs::exists(f / file)) << f / file;
    }
    EXPECT_EQ(test::file_bytes(f / "rgb.pfm").substr(0, 9), "PF\n80 60\n");
    EXPECT_EQ(test::file_bytes(f / "normals.pfm").substr(0, 9), "PF\n80 60\n");
    EXPECT_EQ(test::file_bytes(f / "depth.pfm").substr(0, 9), "Pf\n80 60\n");
    EXPECT_EQ(test::file_bytes(f / "mask.pfm").substr(0, 9), "Pf\n80 60\n");
  }
  EXPECT_FALSE(fs::exists(dir / "out" / frame_name(10)));
  EXPECT_EQ(find_frames(dir / "out").size(), 10u);
  EXPECT_EQ(frame_name(7), "frame_0007");
}

TEST(Render, SidecarRecordsTheRigMotion) {
  const auto dir = test::temp_dir("cli_sidecar");
  RenderArgs args;
  args.config = write_config(dir, "c.json", kTinySweep);
  args.out = dir / "out";
  cmd_render(args);
  const auto frames = find_frames(dir / "out");
  ASSERT_EQ(frames.size(), 10u);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(frames[i].sidecar.frame, i);
    const Pose camera_to_world = frames[i].sidecar.T_cw.inverse();
    EXPECT_LT((camera_to_world.t - Vec3(0.01 * i, 0, 0)).norm(), 1e-12);
    EXPECT_EQ(frames[i].sidecar.intrinsics.width, 80);
  }
}

TEST(Render, SameSeedIsByteIdenticalAndSeedOnlyChangesRgb) {
  const auto dir = test::temp_dir("cli_determinism");
  RenderArgs args;
  args.config = write_config(dir, "c.json", kTinySweep);
  args.out = dir / "a";
  cmd_render(args);
  args.out = dir / "b";
  cmd_render(args);
  args.out = dir / "c";
  args.seed = 99;
  cmd_render(args);
  for (int i = 0; i < 10; ++i) {
    for (const char* file : {"rgb.pfm", "rgb.png", "depth.pfm", "normals.pfm", "mask.pfm", "sidecar.json"}) {
      EXPECT_EQ(test::file_bytes(dir / "a" / frame_name(i) / file), test::file_bytes(dir / "b" / frame_name(i) / file))
          << file;
    }
    for (const char* file : {"depth.pfm", "normals.pfm", "mask.pfm"}) {
      EXPECT_EQ(test::file_bytes(dir / "a" / frame_name(i) / file), test::file_bytes(dir / "c" / frame_name(i) / file))
          << file;
    }
    EXPECT_NE(test::file_bytes(dir / "a" / frame_name(i) / "rgb.pfm"),
              test::file_bytes(dir / "c" / frame_name(i) / "rgb.pfm"));
  }
}

TEST(FindFrames, EmptyDirectoryIsIoError) {
  const auto dir = test::temp_dir("cli_empty");
  EXPECT_EQ(error_code_of([&] { find_frames(dir); }), ErrorCode::kIoError);
}

TEST(ExitCodes, MapErrorFamilies) {
  EXPECT_EQ(exit_code_for(static_cast<int>(ErrorCode::kConfigError)), 2);
  EXPECT_EQ(exit_code_for(static_cast<int>(ErrorCode::kIoError)), 3);
  EXPECT_EQ(exit_code_for(static_cast<int>(ErrorCode::kInsufficientViews)), 4);
  EXPECT_EQ(exit_code_for(static_cast<int>(ErrorCode::kNoConvergence)), 4);
}

TEST(Binary, ExitCodes) {
  const auto dir = test::temp_dir("cli_binary");
  const auto good = write_config(dir, "good.json", kTinySweep);
  const auto bad = write_config(dir, "bad.json", R"({"camera": {"bogus": 1}})");

  RunResult r = run_cli("render --config " + good.string() + " --out " + (dir / "out").string(), dir);
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "frame_0009" / "sidecar.json"));

  r = run_cli("render --config " + bad.string(), dir);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("/camera/bogus"), std::string::npos) << r.err;

  r = run_cli("render --bogus-flag", dir);
  EXPECT_EQ(r.status, 2);
  r = run_cli("", dir);
  EXPECT_EQ(r.status, 2);
  r = run_cli("--help", dir);
  EXPECT_EQ(r.status, 0);

  r = run_cli("render --config " + (dir / "missing.json").string(), dir);
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.err.find("IoError"), std::string::npos) << r.err;
  r = run_cli("extract --input " + (dir / "nowhere").string(), dir);
  EXPECT_EQ(r.status, 3);

  // A plane scene has no checkerboard, so no view survives detection.
  r = run_cli("calibrate-camera --input " + (dir / "out").string() + " --out " + (dir / "cal.json").string(), dir);
  EXPECT_EQ(r.status, 4) << r.err;
}

TEST(Binary, ExtractReconstructEvaluateOnSweep) {
  const auto dir = test::temp_dir("cli_chain");
  const auto cfg = write_config(dir, "c.json", kNarrowSweep);
  const std::string out = (dir / "out").string();
  ASSERT_EQ(run_cli("render --config " + cfg.string() + " --out " + out, dir).status, 0);
  RunResult r = run_cli("extract --input " + out + " --methods rgb,mask", dir);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "frame_0000" / "profile_rgb.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "frame_0000" / "profile_mask.csv"));
  r = run_cli("reconstruct --input " + out + " --out " + (dir / "cloud.ply").string(), dir);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_GT(read_ply(dir / "cloud.ply").size(), 200u);
  r = run_cli("evaluate --input " + out + " --out " + (dir / "eval").string(), dir);
  ASSERT_EQ(r.status, 0) << r.err;
  const Json report = load_json(dir / "eval" / "report.json");
  EXPECT_EQ(report["rgb"]["count"].get<int>(), 3 * 80);
  EXPECT_EQ(report["rgb"]["fraction_within_1mm"].get<double>(), 1.0);
  EXPECT_LT(report["mask"]["mean_abs"].get<double>(), 2e-4);
  EXPECT_EQ(read_text(dir / "eval" / "depth_errors.csv").rfind("frame,row", 0), 0u);
}
