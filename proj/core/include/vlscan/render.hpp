#pragma once

#include <cstdint>
#include <vector>

#include "vlscan/image.hpp"
#include "vlscan/scene.hpp"

namespace vlscan {

enum Pass : unsigned {
  kPassRgb = 1u << 0,
  kPassDepth = 1u << 1,
  kPassNormals = 1u << 2,
  kPassMask = 1u << 3,
  kPassAll = kPassRgb | kPassDepth | kPassNormals | kPassMask,
};

struct RenderOptions {
  unsigned passes = kPassAll;
  int spp = 16;  // RGB only; ground-truth passes sample the pixel center
  std::uint64_t seed = 0;
  int threads = 1;
  bool specular_bounce = true;
};

// Aligned passes. depth is the camera-frame z of the first hit (+inf on a
// miss), normals are camera-frame geometric normals, laser_mask is the
// first-hit laser irradiance before albedo.
struct RenderOutput {
  Image rgb;
  Image depth;
  Image normals;
  Image laser_mask;
};

// Gaussian values below this fraction of the peak count as no laser light.
inline constexpr double kMaskFloor = 1e-6;

// Scene plus its acceleration structure and the list of mirror triangles.
class RenderContext {
 public:
  explicit RenderContext(Scene scene);

  const Scene& scene() const { return scene_; }
  const Accel& accel() const { return accel_; }

  // Direct laser irradiance (scalar, before color and albedo) at a surface
  // point with the given normal. Zero when occluded, outside the fan or below
  // the mask floor.
  double laser_irradiance(const Vec3& point, const Vec3& normal) const;

  // Laser irradiance arriving at `point` after one mirror reflection off a
  // surface with specular_weight > 0, already scaled by that weight.
  double specular_bounce(const Vec3& point, const Vec3& normal, int exclude_triangle = -1) const;

  // World-space ray through pixel (u, v).
  Line3 camera_ray(double u, double v) const;

 private:
  struct Mirror {
    Vec3 v0, v1, v2;
    Vec3 normal;
    double weight;
    int triangle;
  };

  Scene scene_;
  Accel accel_;
  std::vector<Mirror> mirrors_;
  Vec3 camera_center_;
  Mat3 camera_to_world_;
  Mat3 k_inverse_;
};

// RGB contribution: laser color times laser_irradiance.
Vec3 laser_irradiance(const RenderContext& ctx, const Vec3& point, const Vec3& normal);

RenderOutput render(const Scene& scene, const RenderOptions& options);
RenderOutput render(const RenderContext& ctx, const RenderOptions& options);

// Resamples an ideal pinhole image into the distorted image of the same
// camera (bilinear interpolation, black outside the source).
Image distort_image(const Image& ideal, const Intrinsics& K, const Distortion& d);

}  // namespace vlscan
