#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "vlscan/error.hpp"

using namespace vlscan::app;

int main(int argc, char** argv) {
  CLI::App app{"Virtual laser line scanner: render, calibrate, extract, reconstruct, evaluate"};
  app.require_subcommand(1);

  RenderArgs render;
  auto* r = app.add_subcommand("render", "Render every frame of a scan configuration");
  r->add_option("--config", render.config, "Scan configuration (JSON)")->required();
  r->add_option("--seed", render.seed, "Override render.seed");
  r->add_option("--out", render.out, "Override output.dir");
  r->add_option("--threads", render.threads, "Render threads");
  r->add_option("--passes", render.passes, "Comma list of rgb,depth,normals,mask");
  r->add_flag("--distort", render.distort, "Warp the RGB pass with the configured lens distortion");

  PosesArgs poses;
  auto* p = app.add_subcommand("poses", "Generate seeded checkerboard poses");
  p->add_option("--config", poses.config, "Scan configuration with a board_poses sweep")->required();
  p->add_option("--seed", poses.seed, "Override sweep.seed");
  p->add_option("--count", poses.count, "Override sweep.count");
  p->add_option("--out", poses.out, "Output JSON");

  CalibrateCameraArgs cc;
  auto* c = app.add_subcommand("calibrate-camera", "Planar camera calibration from rendered board frames");
  c->add_option("--input", cc.input, "Frame directory or directory of frame_* folders")->required();
  c->add_option("--out", cc.out, "Calibration JSON");
  c->add_flag("--distortion", cc.estimate_distortion, "Estimate k1 k2 p1 p2 k3");
  c->add_flag("--skew", cc.estimate_skew, "Estimate the skew term");

  CalibrateLaserArgs cl;
  auto* l = app.add_subcommand("calibrate-laser", "Laser plane calibration from board frames with a stripe");
  l->add_option("--input", cl.input, "Frame directory or directory of frame_* folders")->required();
  l->add_option("--calibration", cl.calibration, "Camera calibration JSON")->required();
  l->add_option("--out", cl.out, "Plane JSON");

  ExtractArgs ex;
  auto* e = app.add_subcommand("extract", "Extract laser profiles");
  e->add_option("--input", ex.input, "Frame directory or directory of frame_* folders")->required();
  e->add_option("--methods", ex.methods, "Comma list of rgb,mask");
  e->add_option("--out", ex.out, "Output directory (default: next to each frame)");
  e->add_flag("--transpose", ex.transpose, "Stripe runs horizontally");

  ReconstructArgs rc;
  auto* rr = app.add_subcommand("reconstruct", "Triangulate profiles and assemble a point cloud");
  rr->add_option("--input", rc.input, "Frame directory or directory of frame_* folders")->required();
  rr->add_option("--plane", rc.plane, "Plane JSON (default: ground truth from the sidecar)");
  rr->add_option("--calibration", rc.calibration, "Camera calibration JSON (default: sidecar intrinsics)");
  rr->add_option("--method", rc.method, "rgb or mask");
  rr->add_option("--out", rc.out, "Output PLY");

  EvaluateArgs ev;
  auto* v = app.add_subcommand("evaluate", "Compare triangulation methods against ground-truth depth");
  v->add_option("--input", ev.input, "Frame directory or directory of frame_* folders")->required();
  v->add_option("--methods", ev.methods, "Comma list of rgb,mask,gt");
  v->add_option("--plane", ev.plane, "Plane JSON (default: ground truth from the sidecar)");
  v->add_option("--calibration", ev.calibration, "Camera calibration JSON (default: sidecar intrinsics)");
  v->add_option("--out", ev.out, "Output directory for report.json and depth_errors.csv");

  ScanArgs sc;
  auto* s = app.add_subcommand("scan", "Render, extract, triangulate and assemble a sweep");
  s->add_option("--config", sc.config, "Scan configuration (JSON)")->required();
  s->add_option("--seed", sc.seed, "Override render.seed");
  s->add_option("--out", sc.out, "Override output.dir");
  s->add_option("--threads", sc.threads, "Render threads");
  s->add_option("--plane", sc.plane, "Plane JSON (default: ground truth)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    if (*r) cmd_render(render);
    else if (*p) cmd_poses(poses);
    else if (*c) cmd_calibrate_camera(cc);
    else if (*l) cmd_calibrate_laser(cl);
    else if (*e) cmd_extract(ex);
    else if (*rr) cmd_reconstruct(rc);
    else if (*v) cmd_evaluate(ev);
    else if (*s) cmd_scan(sc);
  } catch (const vlscan::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(static_cast<int>(err.code()));
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
