#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "config.hpp"
#include "frames.hpp"
#include "vlscan/error.hpp"
#include "vlscan/io.hpp"
#include "vlscan/pipeline.hpp"
#include "vlscan/recon.hpp"
#include "vlscan/render.hpp"

namespace vlscan::app {

namespace fs = std::filesystem;

int exit_code_for(int error_code) {
  switch (static_cast<ErrorCode>(error_code)) {
    case ErrorCode::kConfigError: return 2;
    case ErrorCode::kIoError: return 3;
    default: return 4;
  }
}

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, dir.string() + ": " + ec.message());
}

PlaneParams canonical(const PlaneParams& p) {
  PlaneParams q = p.normalized();
  return q.d > 0.0 ? q.scaled(-1.0) : q;
}

struct RenderedFrame {
  fs::path dir;
  RenderOutput output;
  Sidecar sidecar;
};

RenderedFrame render_frame(const FrameSetup& f, const ScanConfig& config, const fs::path& out_dir, bool distort) {
  RenderedFrame rf;
  rf.dir = out_dir / frame_name(f.index);
  ensure_dir(rf.dir);
  rf.output = render(f.scene, config.render);
  Sidecar& s = rf.sidecar;
  s.frame = f.index;
  s.seed = config.render.seed;
  s.intrinsics = f.scene.camera.intrinsics;
  s.distortion = f.scene.camera.distortion;
  s.distorted = distort && !s.distortion.is_zero();
  s.T_cw = f.scene.camera.pose_cw;
  s.laser_color = f.scene.laser.color;
  s.laser_plane_camera = canonical(laser_plane(f.scene.laser).transformed(s.T_cw));
  if (f.board_to_camera) {
    s.board = config.sweep.board;
    s.board_to_camera = f.board_to_camera;
  }
  const unsigned passes = config.render.passes;
  if (passes & kPassRgb) {
    if (s.distorted) rf.output.rgb = distort_image(rf.output.rgb, s.intrinsics, s.distortion);
    write_pfm(rf.dir / "rgb.pfm", rf.output.rgb);
    if (config.png) write_png(rf.dir / "rgb.png", rf.output.rgb);
  }
  if (passes & kPassDepth) write_pfm(rf.dir / "depth.pfm", rf.output.depth);
  if (passes & kPassNormals) write_pfm(rf.dir / "normals.pfm", rf.output.normals);
  if (passes & kPassMask) write_pfm(rf.dir / "mask.pfm", rf.output.laser_mask);
  Json laser = to_json(f.scene.laser);
  laser["enabled"] = f.scene.laser_enabled;
  save_json(rf.dir / "sidecar.json", sidecar_json(s, laser, pass_names(passes), config.render.spp));
  return rf;
}

ScanConfig config_with_overrides(const fs::path& path, const std::optional<std::uint64_t>& seed,
                                 const std::optional<fs::path>& out, const std::optional<int>& threads) {
  ScanConfig config = load_config(path);
  if (seed) config.render.seed = *seed;
  if (out) config.output_dir = *out;
  if (threads) {
    if (*threads < 1) throw Error(ErrorCode::kConfigError, "--threads must be at least 1");
    config.render.threads = *threads;
  }
  return config;
}

struct Calibration {
  Intrinsics K;
  Distortion d;
  std::map<int, Pose> poses;  // by frame index
};

Calibration read_calibration(const fs::path& path) {
  const Json j = load_json(path);
  Calibration c;
  try {
    c.K = intrinsics_from(ObjectReader(j.at("intrinsics"), "/intrinsics"));
    c.d = distortion_from(ObjectReader(j.at("distortion"), "/distortion"));
    if (j.contains("views")) {
      for (const auto& v : j.at("views")) {
        c.poses[v.at("frame").get<int>()] = pose_from(ObjectReader(v.at("board_to_camera"), "/views/board_to_camera"));
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIoError, path.string() + ": malformed calibration: " + e.what());
  }
  return c;
}

PlaneParams read_plane(const fs::path& path) {
  const Json j = load_json(path);
  if (!j.contains("plane")) throw Error(ErrorCode::kIoError, path.string() + ": missing plane");
  return plane_from(j.at("plane"), "/plane");
}

Image read_pass(const fs::path& dir, const char* name) { return read_pfm(dir / name); }

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_profile(const fs::path& dir, const std::string& stem, const LaserProfile& p) {
  write_profile_csv(dir / (stem + ".csv"), p);
  save_json(dir / (stem + ".json"), to_json(p));
}

LaserProfile rgb_profile(const FrameDir& f, bool transpose = false) {
  ExtractParams params;
  params.transpose = transpose;
  return extract_profile(read_pass(f.dir, "rgb.pfm"), dominant_channel(f.sidecar.laser_color), params);
}

GroundTruthProfile mask_profile(const FrameDir& f) {
  return ground_truth_profile(read_pass(f.dir, "mask.pfm"), read_pass(f.dir, "depth.pfm"));
}

Json plane_stats(const PlaneFit& fit) {
  return {{"mean_abs_distance", fit.mean_abs_distance},
          {"rms_distance", fit.rms_distance},
          {"max_abs_distance", fit.max_abs_distance},
          {"point_count", fit.point_count},
          {"initial_cost", fit.initial_cost},
          {"final_cost", fit.final_cost}};
}

}  // namespace

void cmd_render(const RenderArgs& args) {
  ScanConfig config = config_with_overrides(args.config, args.seed, args.out, args.threads);
  if (args.passes) config.render.passes = parse_passes(*args.passes);
  ensure_dir(config.output_dir);
  for (const FrameSetup& f : build_frames(config)) {
    const RenderedFrame rf = render_frame(f, config, config.output_dir, args.distort);
    std::cout << rf.dir.string() << "\n";
  }
}

void cmd_poses(const PosesArgs& args) {
  ScanConfig config = load_config(args.config);
  if (args.seed) config.sweep.constraints.seed = *args.seed;
  if (args.count) config.sweep.count = *args.count;
  const auto poses = sweep_board_poses(config);
  Json list = Json::array();
  for (std::size_t i = 0; i < poses.size(); ++i) {
    list.push_back({{"frame", i}, {"board_to_camera", to_json(poses[i])}, {"tilt", board_tilt(poses[i])}});
  }
  save_json(args.out, {{"seed", config.sweep.constraints.seed}, {"poses", list}});
}

void cmd_calibrate_camera(const CalibrateCameraArgs& args) {
  const auto frames = find_frames(args.input);
  std::vector<CalibView> views;
  std::vector<int> frame_ids;
  Json skipped = Json::array();
  const Intrinsics& K0 = frames.front().sidecar.intrinsics;
  for (const FrameDir& f : frames) {
    if (!f.sidecar.board) {
      skipped.push_back({{"frame", f.sidecar.frame}, {"reason", "no checkerboard in sidecar"}});
      continue;
    }
    const BoardObservation obs =
        observe_board(read_pass(f.dir, "rgb.pfm"), *f.sidecar.board, f.sidecar.laser_color, f.sidecar.frame);
    if (!obs.detection.found) {
      skipped.push_back({{"frame", f.sidecar.frame}, {"reason", obs.detection.failure}});
      continue;
    }
    views.push_back(obs.view);
    frame_ids.push_back(f.sidecar.frame);
  }
  ZhangOptions options;
  options.zero_skew = !args.estimate_skew;
  options.estimate_distortion = args.estimate_distortion;
  const CameraCalibration cal = zhang_intrinsics(views, K0.width, K0.height, options);
  Json vj = Json::array();
  for (std::size_t i = 0; i < views.size(); ++i) {
    vj.push_back({{"frame", frame_ids[i]}, {"board_to_camera", to_json(cal.poses[i])}, {"rms_px", cal.view_rms_px[i]}});
  }
  Json out = {{"intrinsics", to_json(cal.intrinsics)},
              {"K", to_json(cal.intrinsics.matrix())},
              {"distortion", to_json(cal.distortion)},
              {"closed_form", to_json(cal.closed_form)},
              {"rms_px", cal.rms_px},
              {"view_count", views.size()},
              {"views", vj},
              {"skipped", skipped},
              {"solver", to_json(cal.report)}};
  const Intrinsics& t = frames.front().sidecar.intrinsics;
  out["ground_truth_error"] = {{"fx", cal.intrinsics.fx - t.fx}, {"fy", cal.intrinsics.fy - t.fy},
                               {"cx", cal.intrinsics.cx - t.cx}, {"cy", cal.intrinsics.cy - t.cy}};
  save_json(args.out, out);
  std::printf("fx %.3f fy %.3f cx %.3f cy %.3f rms %.4f px (%zu views)\n", cal.intrinsics.fx, cal.intrinsics.fy,
              cal.intrinsics.cx, cal.intrinsics.cy, cal.rms_px, views.size());
}

void cmd_calibrate_laser(const CalibrateLaserArgs& args) {
  const Calibration cal = read_calibration(args.calibration);
  const auto frames = find_frames(args.input);
  std::vector<CalibView> views;
  for (const FrameDir& f : frames) {
    if (!f.sidecar.board) continue;
    BoardObservation obs =
        observe_board(read_pass(f.dir, "rgb.pfm"), *f.sidecar.board, f.sidecar.laser_color, f.sidecar.frame);
    if (!obs.detection.found) continue;
    const auto pose = cal.poses.find(f.sidecar.frame);
    if (pose != cal.poses.end()) obs.view.pose = pose->second;
    views.push_back(obs.view);
  }
  const LaserCalibration lc = calibrate_laser_plane(views, cal.K, cal.d);
  Json out = {{"plane", to_json(lc.fit.plane)},
              {"initial_plane", to_json(lc.fit.initial)},
              {"views_used", lc.view_ids},
              {"residuals", plane_stats(lc.fit)},
              {"solver", to_json(lc.fit.report)}};
  const PlaneParams truth = frames.front().sidecar.laser_plane_camera;
  const double angle = normal_angle(lc.fit.plane, truth);
  out["ground_truth_plane"] = to_json(truth);
  out["angle_error_mrad"] = 1e3 * angle;
  save_json(args.out, out);
  std::printf("plane %.6f %.6f %.6f %.6f, %zu points from %zu views, angle error %.4f mrad\n", lc.fit.plane.a,
              lc.fit.plane.b, lc.fit.plane.c, lc.fit.plane.d, lc.points.size(), lc.view_ids.size(), 1e3 * angle);
}

void cmd_extract(const ExtractArgs& args) {
  const auto methods = split_list(args.methods);
  for (const FrameDir& f : find_frames(args.input)) {
    const fs::path dir = args.out ? *args.out / f.dir.filename() : f.dir;
    ensure_dir(dir);
    for (const std::string& m : methods) {
      if (m == "rgb") {
        write_profile(dir, "profile_rgb", rgb_profile(f, args.transpose));
      } else if (m == "mask") {
        const GroundTruthProfile gt = mask_profile(f);
        write_profile(dir, "profile_mask", gt.profile);
      } else {
        throw Error(ErrorCode::kConfigError, "unknown extraction method '" + m + "'");
      }
    }
  }
}

namespace {

struct ReconContext {
  Intrinsics K;
  Distortion d;
  PlaneParams plane;
  bool from_sidecar_K = true;
};

ReconContext recon_context(const FrameDir& f, const std::optional<fs::path>& plane,
                           const std::optional<Calibration>& cal) {
  ReconContext c;
  c.K = cal ? cal->K : f.sidecar.intrinsics;
  c.d = cal ? cal->d : (f.sidecar.distorted ? f.sidecar.distortion : Distortion{});
  c.plane = plane ? read_plane(*plane) : f.sidecar.laser_plane_camera;
  return c;
}

PointCloud triangulate_with(const LaserProfile& p, const ReconContext& c, int frame) {
  return c.d.is_zero() ? triangulate(p, c.K, c.plane, frame) : triangulate(p, c.K, c.d, c.plane, frame);
}

}  // namespace

void cmd_reconstruct(const ReconstructArgs& args) {
  std::optional<Calibration> cal;
  if (args.calibration) cal = read_calibration(*args.calibration);
  std::vector<ScanFrame> scan;
  for (const FrameDir& f : find_frames(args.input)) {
    const ReconContext c = recon_context(f, args.plane, cal);
    LaserProfile profile;
    if (args.method == "rgb") profile = rgb_profile(f);
    else if (args.method == "mask") profile = mask_profile(f).profile;
    else throw Error(ErrorCode::kConfigError, "unknown method '" + args.method + "'");
    scan.push_back({triangulate_with(profile, c, f.sidecar.frame), f.sidecar.T_cw.inverse()});
  }
  const PointCloud cloud = assemble_scan(scan);
  if (args.out.has_parent_path()) ensure_dir(args.out.parent_path());
  write_ply(args.out, cloud);
  std::printf("%d points written to %s\n", cloud.valid_count(), args.out.string().c_str());
}

void cmd_evaluate(const EvaluateArgs& args) {
  const auto methods = split_list(args.methods);
  bool want_rgb = false, want_mask = false, want_gt = false;
  for (const auto& m : methods) {
    if (m == "rgb") want_rgb = true;
    else if (m == "mask") want_mask = true;
    else if (m == "gt") want_gt = true;
    else throw Error(ErrorCode::kConfigError, "unknown method '" + m + "'");
  }
  std::optional<Calibration> cal;
  if (args.calibration) cal = read_calibration(*args.calibration);
  ensure_dir(args.out);

  PointCloud truth_all, rgb_all, mask_all;
  for (const FrameDir& f : find_frames(args.input)) {
    const ReconContext c = recon_context(f, args.plane, cal);
    const GroundTruthProfile gt = mask_profile(f);
    const PointCloud truth = points_from_depth(gt, f.sidecar.intrinsics, f.sidecar.frame);
    truth_all.points.insert(truth_all.points.end(), truth.points.begin(), truth.points.end());
    if (want_rgb) {
      const PointCloud pc = triangulate_with(rgb_profile(f), c, f.sidecar.frame);
      rgb_all.points.insert(rgb_all.points.end(), pc.points.begin(), pc.points.end());
    }
    if (want_mask) {
      const PointCloud pc = triangulate(gt.profile, c.K, c.plane, f.sidecar.frame);
      mask_all.points.insert(mask_all.points.end(), pc.points.begin(), pc.points.end());
    }
  }

  Json report = Json::object();
  std::map<std::pair<int, int>, std::array<double, 3>> table;  // z_gt, z_rgb, z_mask
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const CloudPoint& p : truth_all.points) {
    if (p.valid()) table[{p.frame, p.row}] = {p.p.z(), nan, nan};
  }
  auto add = [&](const char* name, const PointCloud& cloud, int column) {
    const EvalReport r = evaluate(cloud, truth_all);
    report[name] = to_json(r, false);
    report[name]["fraction_within_1mm"] = r.fraction_within(1e-3);
    for (const EvalEntry& e : r.entries) table[{e.frame, e.row}][column] = e.estimate.z();
    std::printf("%-5s n=%zu mean %.6f m rms %.6f m max %.6f m\n", name, r.entries.size(), r.mean, r.rms, r.max_abs);
  };
  if (want_rgb) add("rgb", rgb_all, 1);
  if (want_mask) add("mask", mask_all, 2);
  report["truth_points"] = truth_all.valid_count();
  save_json(args.out / "report.json", report);

  std::ofstream csv(args.out / "depth_errors.csv");
  if (!csv) throw Error(ErrorCode::kIoError, (args.out / "depth_errors.csv").string() + ": cannot open for writing");
  csv << "frame,row";
  if (want_gt) csv << ",z_gt";
  if (want_rgb) csv << ",z_rgb,err_rgb";
  if (want_mask) csv << ",z_mask,err_mask";
  csv << "\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  for (const auto& [key, z] : table) {
    csv << key.first << "," << key.second;
    if (want_gt) csv << "," << num(z[0]);
    if (want_rgb) csv << "," << num(z[1]) << "," << num(z[1] - z[0]);
    if (want_mask) csv << "," << num(z[2]) << "," << num(z[2] - z[0]);
    csv << "\n";
  }
  if (!csv) throw Error(ErrorCode::kIoError, "depth_errors.csv: write failed");
}

void cmd_scan(const ScanArgs& args) {
  const ScanConfig config = config_with_overrides(args.config, args.seed, args.out, args.threads);
  ensure_dir(config.output_dir);
  std::vector<ScanFrame> scan;
  PointCloud truth_all;
  for (const FrameSetup& f : build_frames(config)) {
    const RenderedFrame rf = render_frame(f, config, config.output_dir, false);
    const FrameDir fd{rf.dir, rf.sidecar};
    const ReconContext c = recon_context(fd, args.plane, std::nullopt);
    const LaserProfile profile =
        extract_profile(rf.output.rgb, dominant_channel(rf.sidecar.laser_color), ExtractParams{});
    write_profile(rf.dir, "profile_rgb", profile);
    scan.push_back({triangulate(profile, c.K, c.plane, f.index), f.camera_to_world});
  }
  const PointCloud cloud = assemble_scan(scan);
  write_ply(config.output_dir / "scan.ply", cloud);
  std::printf("%d points from %zu frames written to %s\n", cloud.valid_count(), scan.size(),
              (config.output_dir / "scan.ply").string().c_str());
}

}  // namespace vlscan::app
