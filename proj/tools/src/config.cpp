#include "config.hpp"

#include <map>
#include <sstream>

#include "vlscan/error.hpp"
#include "vlscan/io.hpp"
#include "vlscan/scenarios.hpp"

namespace vlscan::app {

namespace {

CameraRig parse_camera(ObjectReader r) {
  CameraRig rig = reference_camera(0.5);
  if (r.has("reference_scale") && r.has("intrinsics")) config_error(r.path(), "give either reference_scale or intrinsics");
  if (r.has("reference_scale")) {
    const double s = r.number("reference_scale");
    if (!(s > 0.0)) config_error(r.path_of("reference_scale"), "must be positive");
    rig.intrinsics = reference_intrinsics(s);
  }
  if (r.has("intrinsics")) rig.intrinsics = intrinsics_from(r.object("intrinsics"));
  if (r.has("distortion")) rig.distortion = distortion_from(r.object("distortion"));
  if (r.has("pose_cw") && r.has("look_at")) config_error(r.path(), "give either pose_cw or look_at");
  if (r.has("pose_cw")) rig.pose_cw = pose_from(r.object("pose_cw"));
  if (r.has("look_at")) {
    ObjectReader l = r.object("look_at");
    const Vec3 eye = l.vec3("eye");
    const Vec3 target = l.vec3("target");
    const Vec3 up = l.vec3("up", Vec3(0, -1, 0));
    l.finish();
    try {
      rig.pose_cw = look_at(eye, target, up);
    } catch (const Error& e) {
      config_error(l.path(), e.what());
    }
  }
  r.finish();
  return rig;
}

LaserModel parse_laser(ObjectReader r, const CameraRig& camera, bool& enabled) {
  LaserModel laser = reference_laser();
  enabled = r.boolean("enabled", true);
  laser.color = r.vec3("color", laser.color);
  laser.power_mw = r.number("power_mw", laser.power_mw);
  laser.divergence_angle = r.number("divergence_angle", laser.divergence_angle);
  laser.cone_angle = r.number("cone_angle", laser.cone_angle);
  laser.intensity_scale = r.number("intensity_scale", laser.intensity_scale);
  const int placements = r.has("mount") + r.has("pose") + r.has("beam");
  if (placements > 1) config_error(r.path(), "give only one of mount, pose, beam");
  const Pose camera_to_world = camera.pose_cw.inverse();
  laser.pose_wl = camera_to_world * laser.pose_wl;
  if (r.has("mount")) {
    ObjectReader m = r.object("mount");
    const double baseline = m.number("baseline", 0.2);
    const double toe_in = m.number("toe_in", 0.22689280275926285);
    m.finish();
    laser.pose_wl = camera_to_world * side_mounted_laser_pose(baseline, toe_in);
  }
  if (r.has("pose")) laser.pose_wl = pose_from(r.object("pose"));
  if (r.has("beam")) {
    ObjectReader b = r.object("beam");
    const Vec3 origin = b.vec3("origin");
    const Vec3 dir = b.vec3("direction");
    const Vec3 fan = b.vec3("fan", Vec3(0, 1, 0));
    b.finish();
    if (!(dir.norm() > 0.0) || !(dir.normalized().cross(fan).norm() > 1e-9)) {
      config_error(b.path(), "direction must be non-zero and not parallel to fan");
    }
    laser.pose_wl = laser_pose_from_beam(origin, dir, fan);
  }
  r.finish();
  try {
    laser.validate();
  } catch (const Error& e) {
    config_error(r.path(), e.what());
  }
  return laser;
}

Material parse_material(ObjectReader r) {
  Material m;
  m.albedo = r.vec3("albedo", m.albedo);
  m.specular_weight = r.number("specular_weight", m.specular_weight);
  m.roughness = r.number("roughness", m.roughness);
  if (r.has("checker")) m.checker = CheckerTexture{checkerboard_from(r.object("checker"))};
  r.finish();
  try {
    m.validate();
  } catch (const Error& e) {
    config_error(r.path(), e.what());
  }
  return m;
}

void parse_object(ObjectReader r, Scene& scene, const std::map<std::string, Material>& materials,
                  const std::filesystem::path& base_dir) {
  const std::string type = r.string("type", "");
  const std::string mat_name = r.string("material", "default");
  const auto it = materials.find(mat_name);
  if (it == materials.end()) config_error(r.path_of("material"), "unknown material '" + mat_name + "'");
  Material material = it->second;
  const Pose pose = r.has("pose") ? pose_from(r.object("pose")) : Pose{};
  TriMesh mesh;
  try {
    if (type == "plane" || type == "quad") {
      const double w = r.number("width", type == "plane" ? 2.0 : 1.0);
      const double h = r.number("height", w);
      mesh = make_quad(w, h, pose);
    } else if (type == "icosphere") {
      const double radius = r.number("radius", 0.1);
      const int subdiv = r.integer("subdivisions", 2);
      const bool smooth = r.boolean("smooth", true);
      if (subdiv < 0 || subdiv > 6) config_error(r.path_of("subdivisions"), "must be in [0, 6]");
      mesh = make_icosphere(radius, subdiv, smooth ? Shading::kSmooth : Shading::kFlat, pose);
    } else if (type == "v_groove") {
      VGrooveSpec g;
      g.length = r.number("length", g.length);
      g.shoulder_width = r.number("shoulder_width", g.shoulder_width);
      g.opening = r.number("opening", g.opening);
      g.depth = r.number("depth", g.depth);
      mesh = make_v_groove(g, pose);
    } else if (type == "checkerboard") {
      const CheckerboardSpec spec = r.has("board") ? checkerboard_from(r.object("board")) : CheckerboardSpec{};
      CheckerboardFragment frag = checkerboard_scene(spec, pose, material.albedo);
      mesh = std::move(frag.mesh);
      material.checker = frag.material.checker;
    } else if (type == "mesh") {
      const std::filesystem::path file = r.string("path", "");
      if (file.empty()) config_error(r.path_of("path"), "missing mesh file");
      const double scale = r.number("scale", 1.0);
      TriMesh raw = read_off(file.is_absolute() ? file : base_dir / file);
      for (Vec3& v : raw.vertices) v *= scale;
      mesh = raw.transformed(pose);
    } else {
      config_error(r.path_of("type"), "unknown object type '" + type + "'");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError || e.code() == ErrorCode::kIoError) throw;
    config_error(r.path(), e.what());
  }
  r.finish();
  scene.add_mesh(std::move(mesh), material);
}

void parse_scene(ObjectReader r, Scene& scene, const std::filesystem::path& base_dir) {
  scene.ambient_light = r.number("ambient", 0.15);
  scene.background = r.vec3("background", Vec3::Zero());
  if (r.has("lights")) {
    const Json& lights = r.raw("lights");
    if (!lights.is_array()) config_error(r.path_of("lights"), "expected an array");
    for (std::size_t i = 0; i < lights.size(); ++i) {
      ObjectReader l(lights[i], r.path_of("lights") + "/" + std::to_string(i));
      PointLight p;
      p.position = l.vec3("position");
      p.intensity = l.number("intensity", p.intensity);
      p.color = l.vec3("color", p.color);
      l.finish();
      scene.point_lights.push_back(p);
    }
  } else {
    scene.point_lights.push_back({Vec3(0.0, -0.3, 0.0), 0.85, Vec3(1.0, 1.0, 1.0)});
  }
  std::map<std::string, Material> materials = {{"default", Material{}}};
  if (r.has("materials")) {
    const Json& mats = r.raw("materials");
    if (!mats.is_object()) config_error(r.path_of("materials"), "expected an object of named materials");
    for (const auto& [name, value] : mats.items()) {
      materials[name] = parse_material(ObjectReader(value, r.path_of("materials") + "/" + name));
    }
  }
  if (r.has("objects")) {
    const Json& objs = r.raw("objects");
    if (!objs.is_array()) config_error(r.path_of("objects"), "expected an array");
    for (std::size_t i = 0; i < objs.size(); ++i) {
      parse_object(ObjectReader(objs[i], r.path_of("objects") + "/" + std::to_string(i)), scene, materials, base_dir);
    }
  }
  r.finish();
}

RenderOptions parse_render(ObjectReader r) {
  RenderOptions o;
  o.spp = r.integer("spp", o.spp);
  o.seed = r.uint64("seed", o.seed);
  o.threads = r.integer("threads", o.threads);
  o.specular_bounce = r.boolean("specular_bounce", o.specular_bounce);
  if (r.has("passes")) {
    const Json& p = r.raw("passes");
    if (!p.is_array()) config_error(r.path_of("passes"), "expected an array of pass names");
    std::string joined;
    for (const auto& v : p) {
      if (!v.is_string()) config_error(r.path_of("passes"), "expected pass names");
      joined += (joined.empty() ? "" : ",") + v.get<std::string>();
    }
    try {
      o.passes = parse_passes(joined);
    } catch (const Error& e) {
      config_error(r.path_of("passes"), e.what());
    }
  }
  if (o.spp < 1) config_error(r.path_of("spp"), "must be at least 1");
  if (o.threads < 1) config_error(r.path_of("threads"), "must be at least 1");
  r.finish();
  return o;
}

SweepConfig parse_sweep(ObjectReader r) {
  SweepConfig s;
  const std::string mode = r.string("mode", "none");
  s.count = r.integer("count", 1);
  if (s.count < 1) config_error(r.path_of("count"), "must be at least 1");
  if (mode == "none") {
    s.mode = SweepMode::kNone;
    if (s.count != 1) config_error(r.path_of("count"), "a sweep with mode none has one frame");
  } else if (mode == "translate") {
    s.mode = SweepMode::kTranslate;
    s.axis = r.vec3("axis", s.axis);
    if (!(s.axis.norm() > 0.0)) config_error(r.path_of("axis"), "must be non-zero");
    s.axis.normalize();
    s.step = r.number("step", s.step);
  } else if (mode == "board_poses") {
    s.mode = SweepMode::kBoardPoses;
    if (r.has("board")) s.board = checkerboard_from(r.object("board"));
    s.board_albedo = r.vec3("board_albedo", s.board_albedo);
    PoseConstraints& c = s.constraints;
    c.seed = r.uint64("seed", c.seed);
    c.max_tilt = r.number("max_tilt", c.max_tilt);
    c.max_roll = r.number("max_roll", c.max_roll);
    c.max_view_angle = r.number("max_view_angle", c.max_view_angle);
    c.min_distance = r.number("min_distance", c.min_distance);
    c.max_distance = r.number("max_distance", c.max_distance);
    c.margin_px = r.number("margin_px", c.margin_px);
    s.require_laser = r.boolean("require_laser", s.require_laser);
    if (c.max_tilt < 0.0 || c.max_tilt > 1.0471975511965976 + 1e-12) {
      config_error(r.path_of("max_tilt"), "must be within [0, pi/3]");
    }
  } else {
    config_error(r.path_of("mode"), "unknown sweep mode '" + mode + "'");
  }
  r.finish();
  return s;
}

}  // namespace

std::string pass_names(unsigned passes) {
  std::string out;
  auto add = [&](unsigned bit, const char* name) {
    if (passes & bit) out += (out.empty() ? "" : ",") + std::string(name);
  };
  add(kPassRgb, "rgb");
  add(kPassDepth, "depth");
  add(kPassNormals, "normals");
  add(kPassMask, "mask");
  return out;
}

unsigned parse_passes(const std::string& list) {
  unsigned passes = 0;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "rgb") passes |= kPassRgb;
    else if (item == "depth") passes |= kPassDepth;
    else if (item == "normals") passes |= kPassNormals;
    else if (item == "mask") passes |= kPassMask;
    else if (item == "all") passes |= kPassAll;
    else throw Error(ErrorCode::kConfigError, "unknown pass '" + item + "'");
  }
  if (passes == 0) throw Error(ErrorCode::kConfigError, "no passes selected");
  return passes;
}

ScanConfig parse_config(const Json& j, const std::filesystem::path& base_dir) {
  ScanConfig c;
  ObjectReader root(j, "");
  if (root.has("camera")) c.scene.camera = parse_camera(root.object("camera"));
  else c.scene.camera = reference_camera(0.5);
  bool laser_enabled = true;
  if (root.has("laser")) {
    c.scene.laser = parse_laser(root.object("laser"), c.scene.camera, laser_enabled);
  } else {
    c.scene.laser = reference_laser();
    c.scene.laser.pose_wl = c.scene.camera.pose_cw.inverse() * c.scene.laser.pose_wl;
  }
  c.scene.laser_enabled = laser_enabled;
  if (root.has("scene")) {
    parse_scene(root.object("scene"), c.scene, base_dir);
  } else {
    add_default_lighting(c.scene);
  }
  if (root.has("render")) c.render = parse_render(root.object("render"));
  if (root.has("sweep")) c.sweep = parse_sweep(root.object("sweep"));
  if (root.has("output")) {
    ObjectReader o = root.object("output");
    c.output_dir = o.string("dir", c.output_dir.string());
    c.png = o.boolean("png", c.png);
    o.finish();
  }
  root.finish();
  if (c.scene.meshes.empty() && c.sweep.mode != SweepMode::kBoardPoses) {
    config_error("/scene/objects", "the scene has no objects");
  }
  return c;
}

ScanConfig load_config(const std::filesystem::path& path) {
  const Json j = load_json(path);
  try {
    return parse_config(j, path.parent_path());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConfigError) throw;
    std::string msg = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    throw Error(ErrorCode::kConfigError, path.string() + ": " + msg);
  }
}

std::vector<Pose> sweep_board_poses(const ScanConfig& config) {
  PoseConstraints c = config.sweep.constraints;
  c.count = config.sweep.count;
  if (config.sweep.require_laser && config.scene.laser_enabled) {
    c.laser_plane = laser_plane(config.scene.laser).transformed(config.scene.camera.pose_cw);
  }
  return generate_poses(config.scene.camera.intrinsics, config.sweep.board, c);
}

std::vector<FrameSetup> build_frames(const ScanConfig& config) {
  std::vector<FrameSetup> frames;
  const Pose camera_to_world = config.scene.camera.pose_cw.inverse();
  std::vector<Pose> boards;
  if (config.sweep.mode == SweepMode::kBoardPoses) boards = sweep_board_poses(config);
  for (int k = 0; k < config.sweep.count; ++k) {
    FrameSetup f;
    f.index = k;
    f.scene = config.scene;
    f.camera_to_world = camera_to_world;
    if (config.sweep.mode == SweepMode::kTranslate) {
      const Pose motion = Pose::translation(k * config.sweep.step * config.sweep.axis);
      f.camera_to_world = motion * camera_to_world;
      f.scene.camera.pose_cw = f.camera_to_world.inverse();
      f.scene.laser.pose_wl = motion * config.scene.laser.pose_wl;
    } else if (config.sweep.mode == SweepMode::kBoardPoses) {
      f.board_to_camera = boards[k];
      CheckerboardFragment board =
          checkerboard_scene(config.sweep.board, camera_to_world * boards[k], config.sweep.board_albedo);
      f.scene.add_mesh(std::move(board.mesh), board.material);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace vlscan::app
