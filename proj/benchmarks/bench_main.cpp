#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "vlscan/calib.hpp"
#include "vlscan/extract.hpp"
#include "vlscan/lm.hpp"
#include "vlscan/render.hpp"
#include "vlscan/scenarios.hpp"
#include "vlscan/scene.hpp"

using namespace vlscan;

namespace {

std::vector<Line3> camera_rays(const Intrinsics& K, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, K.width), v(0.0, K.height);
  std::vector<Line3> rays;
  for (int i = 0; i < n; ++i) rays.push_back(unproject_to_ray(K, Pixel(u(rng), v(rng))));
  return rays;
}

void BM_AccelIntersect(benchmark::State& state) {
  const int subdivisions = static_cast<int>(state.range(0));
  const Accel accel({make_icosphere(0.3, subdivisions, Shading::kSmooth, Pose::translation(Vec3(0, 0, 1)))});
  const auto rays = camera_rays(reference_intrinsics(0.25), 4096, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(accel.intersect(rays[i++ % rays.size()]));
  }
  state.counters["triangles"] = static_cast<double>(accel.triangle_count());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AccelIntersect)->Arg(2)->Arg(4)->Arg(6);

void BM_RenderPlane(benchmark::State& state) {
  const Scene s = plane_scene(reference_camera(0.25), reference_laser(), 1.0);
  RenderOptions o;
  o.spp = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(render(s, o));
  state.SetItemsProcessed(state.iterations() * s.camera.intrinsics.width * s.camera.intrinsics.height);
}
BENCHMARK(BM_RenderPlane)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ExtractProfile(benchmark::State& state) {
  const Scene s = plane_scene(reference_camera(0.5), reference_laser(), 1.0);
  RenderOptions o;
  o.passes = kPassRgb;
  o.spp = 4;
  const Image rgb = render(s, o).rgb;
  for (auto _ : state) benchmark::DoNotOptimize(extract_profile(rgb, LaserChannel::kBlue));
  state.SetItemsProcessed(state.iterations() * rgb.height());
}
BENCHMARK(BM_ExtractProfile)->Unit(benchmark::kMillisecond);

void BM_HomographyDlt(benchmark::State& state) {
  const Intrinsics K = reference_intrinsics();
  const Pose pose{rot_y(0.3) * rot_x(-0.2), Vec3(0.02, -0.01, 0.9)};
  std::vector<Correspondence2D3D> c;
  for (const Vec3& p : checkerboard_corners(CheckerboardSpec{})) {
    c.push_back({project_camera_point(K, {}, pose.apply(p)), p.head<2>()});
  }
  for (auto _ : state) benchmark::DoNotOptimize(estimate_homography_dlt(c));
}
BENCHMARK(BM_HomographyDlt);

void BM_LmGaussianFit(benchmark::State& state) {
  std::vector<double> y(21);
  for (int i = 0; i < 21; ++i) y[i] = std::exp(-0.5 * std::pow((i - 10.37) / 2.3, 2));
  for (auto _ : state) benchmark::DoNotOptimize(fit_gaussian_1d(y, 0, 10.0, 2.0));
}
BENCHMARK(BM_LmGaussianFit);

void BM_LaserPlaneFit(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 1e-4);
  const PlaneParams truth = laser_plane(reference_laser());
  std::vector<Vec3> pts;
  for (int i = 0; i < state.range(0); ++i) {
    const double y = -0.2 + 0.4 * i / state.range(0);
    const double z = 0.8 + 0.4 * ((i * 7919) % 101) / 100.0;
    const double x = -(truth.b * y + truth.c * z + truth.d) / truth.a;
    pts.emplace_back(x + noise(rng), y + noise(rng), z + noise(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_laser_plane(pts));
}
BENCHMARK(BM_LaserPlaneFit)->Arg(300)->Arg(3000);

}  // namespace

BENCHMARK_MAIN();
