#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "vlscan/corners.hpp"
#include "vlscan/imgproc.hpp"
#include "vlscan/render.hpp"
#include "vlscan/scenarios.hpp"

using namespace vlscan;

namespace {

Image render_board(const Pose& board_to_camera, bool with_board = true) {
  const CameraRig cam = reference_camera(0.25);
  const CheckerboardSpec spec;
  Scene s = board_scene(cam, reference_laser(), spec, board_to_camera);
  if (!with_board) s = plane_scene(cam, reference_laser(), 1.0);
  RenderOptions o;
  o.passes = kPassRgb;
  o.spp = 16;
  const RenderOutput out = render(s, o);
  return extract_channel(out.rgb, detection_channel(reference_laser().color));
}

void expect_matches_projection(const Pose& board_to_camera, double tol) {
  const CheckerboardSpec spec;
  const Intrinsics K = reference_intrinsics(0.25);
  const CornerDetection det = detect_checkerboard(render_board(board_to_camera), spec);
  ASSERT_TRUE(det.found) << det.failure;
  const auto corners = checkerboard_corners(spec);
  ASSERT_EQ(det.corners.size(), corners.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const Pixel truth = project_camera_point(K, {}, board_to_camera.apply(corners[i]));
    worst = std::max(worst, (det.corners[i] - truth).norm());
  }
  EXPECT_LT(worst, tol);
}

// Hyperbolic saddle with its axes rotated by a, centered at c.
Image saddle_image(const Vec2& c, double a) {
  Image img(21, 21, 1);
  for (int y = 0; y < 21; ++y) {
    for (int x = 0; x < 21; ++x) {
      const double u = std::cos(a) * (x - c.x()) + std::sin(a) * (y - c.y());
      const double v = -std::sin(a) * (x - c.x()) + std::cos(a) * (y - c.y());
      img.at(x, y) = 0.01 * (u * u - v * v);
    }
  }
  return img;
}

}  // namespace

TEST(DetectionChannel, LeastLaserComponent) {
  EXPECT_EQ(detection_channel(Vec3(0, 0, 1)), 0);
  EXPECT_EQ(detection_channel(Vec3(1, 0.2, 0.5)), 1);
  EXPECT_EQ(detection_channel(Vec3(0.3, 1, 0.1)), 2);
}

TEST(DetectCheckerboard, FrontoParallelBoardMatchesProjection) {
  expect_matches_projection(Pose::translation(Vec3(0.01, -0.02, 0.8)), 0.1);
}

TEST(DetectCheckerboard, TiltedBoardMatchesProjection) {
  expect_matches_projection(Pose{rot_y(0.5) * rot_x(-0.3) * rot_z(0.2), Vec3(-0.03, 0.02, 0.9)}, 0.1);
}

TEST(DetectCheckerboard, PlainWallHasNoBoard) {
  const CornerDetection det = detect_checkerboard(render_board(Pose{}, false), CheckerboardSpec{});
  EXPECT_FALSE(det.found);
  EXPECT_FALSE(det.failure.empty());
}

TEST(DetectCheckerboard, BlackImageHasNoBoard) {
  EXPECT_FALSE(detect_checkerboard(Image(160, 120, 1), CheckerboardSpec{}).found);
}

TEST(RefineSaddle, RecoversAnalyticSaddle) {
  test::Rng rng(121);
  for (int i = 0; i < 50; ++i) {
    const Vec2 c(rng.uniform(9, 11), rng.uniform(9, 11));
    const Image img = saddle_image(c, rng.uniform(0, M_PI));
    const Pixel p = refine_saddle(img, Pixel(std::round(c.x()), std::round(c.y())));
    EXPECT_LT((p - c).norm(), 1e-9);
  }
}

TEST(RefineSaddle, BowlIsNotASaddle) {
  Image img(21, 21, 1);
  for (int y = 0; y < 21; ++y)
    for (int x = 0; x < 21; ++x) img.at(x, y) = std::pow(x - 10.3, 2) + std::pow(y - 9.8, 2);
  const Pixel start(10, 10);
  EXPECT_EQ(refine_saddle(img, start), start);
}
