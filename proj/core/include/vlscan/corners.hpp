#pragma once

#include <string>
#include <vector>

#include "vlscan/camera.hpp"
#include "vlscan/image.hpp"
#include "vlscan/scene.hpp"

namespace vlscan {

struct CornerDetectorOptions {
  double smoothing_sigma = 1.5;
  double response_threshold = 0.05;  // relative to the strongest saddle response
  int nms_radius = 3;
  double ring_radius = 4.0;          // px, for the X-junction test
  double min_contrast = 0.05;        // ring amplitude relative to the image maximum
  int refine_half_window = 2;        // 5 x 5 quadratic fit
  int max_seeds = 12;
};

struct CornerDetection {
  bool found = false;
  // Row-major in the order of checkerboard_corners(): board x along a row,
  // board y across rows. The board frame is assumed right-handed with +z
  // pointing away from the camera, so board x runs towards increasing u.
  std::vector<Pixel> corners;
  std::vector<Pixel> candidates;  // every accepted X-junction, for diagnostics
  std::string failure;
};

CornerDetection detect_checkerboard(const Image& gray, const CheckerboardSpec& spec,
                                    const CornerDetectorOptions& options = {});

// Iterated quadratic fit of the saddle point in a (2 half_window + 1)^2
// window of an already smoothed image. Returns the start point if the fit is
// not a saddle or wanders more than two pixels.
Pixel refine_saddle(const Image& smoothed, const Pixel& start, int half_window = 2);

// Channel in which the laser is least visible, for corner detection on boards
// that also carry the stripe.
int detection_channel(const Vec3& laser_color);

}  // namespace vlscan
