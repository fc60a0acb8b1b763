#include "vlscan/scenarios.hpp"

#include <numbers>

namespace vlscan {

Intrinsics reference_intrinsics(double scale) {
  Intrinsics K;
  K.fx = 3478.3;
  K.fy = 3478.3;
  K.cx = 1224.0;
  K.cy = 1024.0;
  K.width = 2448;
  K.height = 2048;
  return scale == 1.0 ? K : K.scaled(scale);
}

CameraRig reference_camera(double scale) {
  CameraRig rig;
  rig.intrinsics = reference_intrinsics(scale);
  return rig;
}

LaserModel reference_laser() {
  LaserModel laser;
  laser.pose_wl = side_mounted_laser_pose(0.2, 13.0 * std::numbers::pi / 180.0);
  return laser;
}

void add_default_lighting(Scene& scene) {
  scene.ambient_light = 0.15;
  scene.point_lights.push_back({Vec3(0.0, -0.3, 0.0), 0.85, Vec3(1.0, 1.0, 1.0)});
}

Scene board_scene(const CameraRig& camera, const LaserModel& laser, const CheckerboardSpec& spec,
                  const Pose& board_to_camera, bool laser_enabled) {
  Scene scene;
  scene.camera = camera;
  scene.laser = laser;
  scene.laser_enabled = laser_enabled;
  add_default_lighting(scene);
  // Board poses are given in the camera frame.
  const Pose board_to_world = camera.pose_cw.inverse() * board_to_camera;
  CheckerboardFragment board = checkerboard_scene(spec, board_to_world);
  scene.add_mesh(std::move(board.mesh), board.material);
  return scene;
}

Scene plane_scene(const CameraRig& camera, const LaserModel& laser, double distance, const Vec3& albedo,
                  double size) {
  Scene scene;
  scene.camera = camera;
  scene.laser = laser;
  add_default_lighting(scene);
  const Pose to_world = camera.pose_cw.inverse() * Pose::translation(Vec3(0.0, 0.0, distance));
  Material m;
  m.albedo = albedo;
  scene.add_mesh(make_quad(size, size, to_world), m);
  return scene;
}

Scene v_groove_scene(const CameraRig& camera, const LaserModel& laser, const VGrooveSpec& groove,
                     double distance, double specular_weight, const Vec3& albedo) {
  Scene scene;
  scene.camera = camera;
  scene.laser = laser;
  add_default_lighting(scene);
  // Local x (groove axis) along camera x, local z (groove depth) along +z.
  const Pose to_world = camera.pose_cw.inverse() * Pose::translation(Vec3(0.0, 0.0, distance));
  Material m;
  m.albedo = albedo;
  m.specular_weight = specular_weight;
  m.roughness = 0.0;
  scene.add_mesh(make_v_groove(groove, to_world), m);
  return scene;
}

}  // namespace vlscan
