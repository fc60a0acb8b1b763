#include "vlscan/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "vlscan/error.hpp"
#include "vlscan/imgproc.hpp"

namespace vlscan {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Per-pixel stream keyed by (seed, x, y) so output never depends on threading.
class PixelRng {
 public:
  PixelRng(std::uint64_t seed, int x, int y)
      : state_(splitmix64(seed ^ splitmix64((static_cast<std::uint64_t>(y) << 32) |
                                            static_cast<std::uint32_t>(x)))) {}
  double uniform() {
    state_ = splitmix64(state_);
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

bool inside_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& n) {
  return (b - a).cross(p - a).dot(n) >= 0.0 && (c - b).cross(p - b).dot(n) >= 0.0 &&
         (a - c).cross(p - c).dot(n) >= 0.0;
}

constexpr double kShadowEps = 1e-6;

}  // namespace

RenderContext::RenderContext(Scene scene) : scene_(std::move(scene)), accel_(scene_.meshes) {
  int global = 0;
  for (const TriMesh& mesh : scene_.meshes) {
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i, ++global) {
      const double w = scene_.materials.at(mesh.material_ids[i]).specular_weight;
      if (w <= 0.0) continue;
      const auto& t = mesh.triangles[i];
      Mirror m{mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], Vec3::Zero(), w, global};
      m.normal = (m.v1 - m.v0).cross(m.v2 - m.v0).normalized();
      mirrors_.push_back(m);
    }
  }
  const Pose cam_to_world = scene_.camera.pose_cw.inverse();
  camera_center_ = cam_to_world.t;
  camera_to_world_ = cam_to_world.R;
  k_inverse_ = scene_.camera.intrinsics.inverse();
}

Line3 RenderContext::camera_ray(double u, double v) const {
  return {camera_center_, camera_to_world_ * (k_inverse_ * Vec3(u, v, 1.0))};
}

double RenderContext::laser_irradiance(const Vec3& point, const Vec3& normal) const {
  if (!scene_.laser_enabled) return 0.0;
  const LaserModel& laser = scene_.laser;
  const Vec3 d = point - laser.origin();
  const double r = d.norm();
  if (!(r > kShadowEps)) return 0.0;
  const Vec3 dir = d / r;
  const double cos_in = -normal.dot(dir);
  if (cos_in <= 0.0) return 0.0;
  const Vec3 local = laser.pose_wl.R.transpose() * dir;
  if (!(local.z() < 0.0)) return 0.0;
  const double g = gaussian_mask(laser, local);
  if (g < kMaskFloor) return 0.0;
  if (accel_.occluded(laser.origin(), dir, r - kShadowEps)) return 0.0;
  return laser.power_mw * laser.intensity_scale * laser.power_scale() * g * cos_in / (r * r);
}

double RenderContext::specular_bounce(const Vec3& point, const Vec3& normal,
                                      int exclude_triangle) const {
  if (!scene_.laser_enabled || mirrors_.empty()) return 0.0;
  const LaserModel& laser = scene_.laser;
  const Vec3 L = laser.origin();
  double total = 0.0;
  for (const Mirror& m : mirrors_) {
    if (m.triangle == exclude_triangle) continue;
    const double sl = (L - m.v0).dot(m.normal);
    const double sp = (point - m.v0).dot(m.normal);
    // Source and receiver must face the same side of the mirror.
    if (sl * sp <= 0.0 || std::abs(sp) < kShadowEps) continue;
    const Vec3 virtual_source = L - 2.0 * sl * m.normal;
    // Segment virtual_source -> point crosses the mirror plane at tau.
    const double tau = sl / (sl + sp);
    const Vec3 y = virtual_source + tau * (point - virtual_source);
    if (!inside_triangle(y, m.v0, m.v1, m.v2, m.normal)) continue;

    const Vec3 to_mirror = y - L;
    const double r1 = to_mirror.norm();
    const Vec3 to_point = point - y;
    const double r2 = to_point.norm();
    if (!(r1 > kShadowEps) || !(r2 > kShadowEps)) continue;
    const Vec3 dir_out = to_point / r2;
    const double cos_in = -normal.dot(dir_out);
    if (cos_in <= 0.0) continue;
    const Vec3 local = laser.pose_wl.R.transpose() * (to_mirror / r1);
    if (!(local.z() < 0.0)) continue;
    const double g = gaussian_mask(laser, local);
    if (g < kMaskFloor) continue;
    if (accel_.occluded(L, to_mirror / r1, r1 - kShadowEps)) continue;
    if (accel_.occluded(y, dir_out, r2 - kShadowEps)) continue;
    const double path = r1 + r2;
    total += m.weight * laser.power_mw * laser.intensity_scale * laser.power_scale() * g * cos_in /
             (path * path);
  }
  return total;
}

Vec3 laser_irradiance(const RenderContext& ctx, const Vec3& point, const Vec3& normal) {
  return ctx.scene().laser.color * ctx.laser_irradiance(point, normal);
}

RenderOutput render(const Scene& scene, const RenderOptions& options) {
  return render(RenderContext(scene), options);
}

RenderOutput render(const RenderContext& ctx, const RenderOptions& options) {
  const Scene& scene = ctx.scene();
  const int w = scene.camera.intrinsics.width;
  const int h = scene.camera.intrinsics.height;
  if (w <= 0 || h <= 0) throw Error(ErrorCode::kConfigError, "image size must be positive");
  if (options.spp < 1) throw Error(ErrorCode::kConfigError, "spp must be at least 1");

  RenderOutput out;
  const double inf = std::numeric_limits<double>::infinity();
  if (options.passes & kPassRgb) out.rgb = Image(w, h, 3);
  if (options.passes & kPassDepth) out.depth = Image(w, h, 1, inf);
  if (options.passes & kPassNormals) out.normals = Image(w, h, 3);
  if (options.passes & kPassMask) out.laser_mask = Image(w, h, 1);

  const bool bounce = options.specular_bounce && scene.has_specular();
  const Mat3& R_cw = scene.camera.pose_cw.R;
  const Vec3& t_cw = scene.camera.pose_cw.t;
  const int grid_x = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(options.spp))));
  const int grid_y = (options.spp + grid_x - 1) / grid_x;

  auto shade = [&](const Hit& hit) -> Vec3 {
    const Material& mat = scene.materials[hit.material];
    const Vec3& n = hit.shading_normal;
    Vec3 irradiance = Vec3::Constant(scene.ambient_light);
    for (const PointLight& light : scene.point_lights) {
      const Vec3 d = light.position - hit.point;
      const double r = d.norm();
      const double c = n.dot(d) / r;
      if (c <= 0.0 || ctx.accel().occluded(hit.point, d / r, r - kShadowEps)) continue;
      irradiance += light.color * (light.intensity * c / (r * r));
    }
    double laser = ctx.laser_irradiance(hit.point, n);
    if (bounce) laser += ctx.specular_bounce(hit.point, n, hit.triangle);
    irradiance += scene.laser.color * laser;
    return mat.albedo_at(hit.uv).cwiseProduct(irradiance);
  };

  auto render_row = [&](int y) {
    for (int x = 0; x < w; ++x) {
      if (options.passes & (kPassDepth | kPassNormals | kPassMask)) {
        const Line3 ray = ctx.camera_ray(x, y);
        if (auto hit = ctx.accel().intersect(ray)) {
          if (options.passes & kPassDepth) out.depth.at(x, y) = (R_cw * hit->point + t_cw).z();
          if (options.passes & kPassNormals) {
            const Vec3 nc = R_cw * hit->geometric_normal;
            for (int c = 0; c < 3; ++c) out.normals.at(x, y, c) = nc[c];
          }
          if (options.passes & kPassMask) {
            out.laser_mask.at(x, y) = ctx.laser_irradiance(hit->point, hit->geometric_normal);
          }
        }
      }
      if (options.passes & kPassRgb) {
        PixelRng rng(options.seed, x, y);
        Vec3 sum = Vec3::Zero();
        for (int k = 0; k < options.spp; ++k) {
          const double jx = (k % grid_x + rng.uniform()) / grid_x - 0.5;
          const double jy = (k / grid_x + rng.uniform()) / grid_y - 0.5;
          const Line3 ray = ctx.camera_ray(x + jx, y + jy);
          auto hit = ctx.accel().intersect(ray);
          sum += hit ? shade(*hit) : scene.background;
        }
        sum /= options.spp;
        for (int c = 0; c < 3; ++c) out.rgb.at(x, y, c) = sum[c];
      }
    }
  };

  const int threads = std::max(1, std::min(options.threads, h));
  if (threads == 1) {
    for (int y = 0; y < h; ++y) render_row(y);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int y = t; y < h; y += threads) render_row(y);
      });
    }
  }
  return out;
}

Image distort_image(const Image& ideal, const Intrinsics& K, const Distortion& d) {
  Image out(ideal.width(), ideal.height(), ideal.channels());
  const Mat3 Ki = K.inverse();
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      // Output pixel sees the ideal pixel of its undistorted direction.
      const Vec3 n = Ki * Vec3(x, y, 1.0);
      Vec2 u;
      try {
        u = undistort(d, n.head<2>());
      } catch (const Error&) {
        continue;
      }
      const double sx = K.fx * u.x() + K.s * u.y() + K.cx;
      const double sy = K.fy * u.y() + K.cy;
      const double eps = 1e-9;
      if (sx < -eps || sy < -eps || sx > ideal.width() - 1 + eps || sy > ideal.height() - 1 + eps) continue;
      for (int c = 0; c < out.channels(); ++c) out.at(x, y, c) = sample_bilinear(ideal, sx, sy, c);
    }
  }
  return out;
}

}  // namespace vlscan
