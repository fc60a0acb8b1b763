#pragma once

#include <string_view>
#include <vector>

#include "vlscan/camera.hpp"
#include "vlscan/image.hpp"
#include "vlscan/lm.hpp"

namespace vlscan {

enum class LaserChannel { kRed = 0, kGreen = 1, kBlue = 2 };

// Channel with the largest component of the laser color.
LaserChannel dominant_channel(const Vec3& laser_color);

enum class RowStatus { kValid, kNoLaser, kFitFailed, kThinMask };

std::string_view to_string(RowStatus s);

struct ProfileRow {
  int row = 0;
  double col = 0.0;        // sub-pixel
  double amplitude = 0.0;
  double sigma = 0.0;      // px
  RowStatus status = RowStatus::kNoLaser;
  bool multi_peak = false; // secondary maximum in the fit window above the ratio
  int candidates = 0;      // separate above-threshold segments in the row

  bool valid() const { return status == RowStatus::kValid; }
};

struct LaserProfile {
  int width = 0;              // extent along `col`
  int height = 0;             // number of rows
  bool transposed = false;    // rows are image columns
  std::vector<ProfileRow> rows;

  // Image position of a row entry.
  Pixel pixel(const ProfileRow& r) const {
    return transposed ? Pixel(r.row, r.col) : Pixel(r.col, r.row);
  }
  int valid_count() const;
};

struct ExtractParams {
  double smoothing_sigma = 1.0;  // kernel truncated at 3 sigma
  double threshold = 0.1;        // on the normalized image
  double min_sigma = 0.3;
  double max_sigma = 20.0;
  double multi_peak_ratio = 0.5;
  bool transpose = false;        // horizontal stripes
  LMOptions lm{};

  int window_half_width() const;
};

// Laser channel minus the mean of the other two. May be negative.
Image channel_difference(const Image& rgb, LaserChannel channel);

struct DiscretePeaks {
  Image smoothed;        // clipped and smoothed, before any normalization
  Image normalized;      // mean removed, normalized to unit maximum, thresholded
  std::vector<int> peak; // per row, -1 when the row has no laser
  std::vector<int> candidates;
};

DiscretePeaks discrete_peaks(const Image& diff, const ExtractParams& params = {});

// Per-row Gaussian fit (amplitude, center, sigma) on the smoothed image around
// each discrete peak.
LaserProfile subpixel_refine(const Image& smoothed, const std::vector<int>& peaks,
                             const ExtractParams& params = {});

// channel_difference, discrete_peaks and subpixel_refine in sequence,
// transposing first when params.transpose is set.
LaserProfile extract_profile(const Image& rgb, LaserChannel channel, const ExtractParams& params = {});

struct GroundTruthProfile {
  LaserProfile profile;
  std::vector<double> depth;  // per row, NaN when invalid
};

// Sub-pixel stripe center from the laser-mask pass and the depth at that
// location by inverse-distance weighting of the finite depths in the 3 x 3
// neighborhood.
GroundTruthProfile ground_truth_profile(const Image& mask, const Image& depth, const ExtractParams& params = {});

double interpolate_depth(const Image& depth, const Pixel& px);

struct GaussianFit {
  double amplitude = 0.0;
  double center = 0.0;
  double sigma = 0.0;
  bool converged = false;
};

// Residuals a exp(-(x0 + i - c)^2 / (2 s^2)) - y[i] over p = (a, c, s).
LeastSquaresProblem gaussian_problem(std::vector<double> y, int x0);

// Least-squares fit of a exp(-(x - c)^2 / (2 s^2)) to samples y[i] at x0 + i.
GaussianFit fit_gaussian_1d(const std::vector<double>& y, int x0, double center0, double sigma0,
                            const LMOptions& options = {});

}  // namespace vlscan
