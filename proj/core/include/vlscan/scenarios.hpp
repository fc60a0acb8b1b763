#pragma once

#include "vlscan/camera.hpp"
#include "vlscan/laser.hpp"
#include "vlscan/scene.hpp"

namespace vlscan {

// 2448 x 2048 sensor with fx = fy = 3478.3, principal point at the center,
// optionally resampled (scale 0.5 gives 1224 x 1024).
Intrinsics reference_intrinsics(double scale = 1.0);

// Camera at the world origin looking along +z.
CameraRig reference_camera(double scale = 1.0);

// Blue line laser 0.2 m to the right of the camera, toed in by 13 degrees.
LaserModel reference_laser();

// Ambient term plus a point light just above the camera.
void add_default_lighting(Scene& scene);

// Checkerboard sheet at board_to_camera on a black background.
Scene board_scene(const CameraRig& camera, const LaserModel& laser, const CheckerboardSpec& spec,
                  const Pose& board_to_camera, bool laser_enabled = true);

// Fronto-parallel Lambertian plane at the given depth.
Scene plane_scene(const CameraRig& camera, const LaserModel& laser, double distance,
                  const Vec3& albedo = Vec3(0.8, 0.8, 0.8), double size = 1.5);

// V-groove running along the camera x axis, opening towards the camera, its
// shoulders at the given depth. All faces share one material.
Scene v_groove_scene(const CameraRig& camera, const LaserModel& laser, const VGrooveSpec& groove,
                     double distance, double specular_weight, const Vec3& albedo = Vec3(0.6, 0.6, 0.6));

}  // namespace vlscan
