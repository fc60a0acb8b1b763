#include "vlscan/extract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "vlscan/imgproc.hpp"

namespace vlscan {

LaserChannel dominant_channel(const Vec3& laser_color) {
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (laser_color[c] > laser_color[best]) best = c;
  }
  return static_cast<LaserChannel>(best);
}

std::string_view to_string(RowStatus s) {
  switch (s) {
    case RowStatus::kValid: return "valid";
    case RowStatus::kNoLaser: return "no_laser";
    case RowStatus::kFitFailed: return "fit_failed";
    case RowStatus::kThinMask: return "thin_mask";
  }
  return "unknown";
}

int LaserProfile::valid_count() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const ProfileRow& r) { return r.valid(); }));
}

int ExtractParams::window_half_width() const {
  return std::max(4, static_cast<int>(std::ceil(3.0 * smoothing_sigma * 3.0)));
}

Image channel_difference(const Image& rgb, LaserChannel channel) {
  const int c = static_cast<int>(channel);
  const int o1 = (c + 1) % 3;
  const int o2 = (c + 2) % 3;
  Image out(rgb.width(), rgb.height(), 1);
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      out.at(x, y) = rgb.at(x, y, c) - 0.5 * (rgb.at(x, y, o1) + rgb.at(x, y, o2));
    }
  }
  return out;
}

DiscretePeaks discrete_peaks(const Image& diff, const ExtractParams& params) {
  Image clipped = diff;
  for (double& v : clipped.data()) v = std::max(v, 0.0);
  DiscretePeaks out;
  out.smoothed = gaussian_blur(clipped, params.smoothing_sigma,
                               static_cast<int>(std::ceil(3.0 * params.smoothing_sigma)));

  double mean = 0.0;
  for (double v : out.smoothed.data()) mean += v;
  mean /= std::max<std::size_t>(1, out.smoothed.data().size());
  out.normalized = out.smoothed;
  double peak = 0.0;
  for (double& v : out.normalized.data()) {
    v = std::max(v - mean, 0.0);
    peak = std::max(peak, v);
  }
  for (double& v : out.normalized.data()) {
    v = peak > 0.0 ? v / peak : 0.0;
    if (v < params.threshold) v = 0.0;
  }

  const int w = diff.width();
  out.peak.assign(diff.height(), -1);
  out.candidates.assign(diff.height(), 0);
  for (int y = 0; y < diff.height(); ++y) {
    const auto row = out.normalized.row(y);
    int best = -1;
    double best_v = 0.0;
    int segments = 0;
    for (int x = 0; x < w; ++x) {
      if (row[x] > best_v) {
        best_v = row[x];
        best = x;
      }
      if (row[x] > 0.0 && (x == 0 || row[x - 1] == 0.0)) ++segments;
    }
    out.peak[y] = best;
    out.candidates[y] = segments;
  }
  return out;
}

LeastSquaresProblem gaussian_problem(std::vector<double> y, int x0) {
  auto samples = std::make_shared<const std::vector<double>>(std::move(y));
  LeastSquaresProblem prob;
  prob.residual = [samples, x0](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    const int n = static_cast<int>(samples->size());
    r.resize(n);
    for (int i = 0; i < n; ++i) {
      const double d = (x0 + i - p(1)) / p(2);
      r(i) = p(0) * std::exp(-0.5 * d * d) - (*samples)[i];
    }
  };
  prob.jacobian = [samples, x0](const Eigen::VectorXd& p, Eigen::MatrixXd& J) {
    const int n = static_cast<int>(samples->size());
    J.resize(n, 3);
    for (int i = 0; i < n; ++i) {
      const double u = x0 + i - p(1);
      const double d = u / p(2);
      const double e = std::exp(-0.5 * d * d);
      J(i, 0) = e;
      J(i, 1) = p(0) * e * u / (p(2) * p(2));
      J(i, 2) = p(0) * e * u * u / (p(2) * p(2) * p(2));
    }
  };
  return prob;
}

GaussianFit fit_gaussian_1d(const std::vector<double>& y, int x0, double center0, double sigma0,
                            const LMOptions& options) {
  GaussianFit fit;
  const int n = static_cast<int>(y.size());
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  if (n < 3 || !(scale > 0.0)) return fit;

  std::vector<double> normalized(y);
  for (double& v : normalized) v /= scale;
  const LeastSquaresProblem prob = gaussian_problem(std::move(normalized), x0);
  const int ic = std::clamp(static_cast<int>(std::lround(center0)) - x0, 0, n - 1);
  Eigen::VectorXd p0(3);
  p0 << std::max(y[ic] / scale, 1e-3), center0, sigma0;
  const LMResult res = lm_solve(prob.residual, prob.jacobian, p0, options);
  fit.amplitude = res.x(0) * scale;
  fit.center = res.x(1);
  fit.sigma = std::abs(res.x(2));
  fit.converged = res.x.allFinite() && (res.report.converged() || res.report.final_cost < 1e-20);
  return fit;
}

namespace {

// Half width at half maximum around index c, converted to a Gaussian sigma.
double sigma_from_half_max(std::span<const double> row, int c) {
  const double half = 0.5 * row[c];
  auto crossing = [&](int dir) {
    int x = c;
    while (x + dir >= 0 && x + dir < static_cast<int>(row.size()) && row[x + dir] > half) x += dir;
    if (x + dir < 0 || x + dir >= static_cast<int>(row.size())) return std::abs(x - c) + 0.5;
    const double a = row[x];
    const double b = row[x + dir];
    return std::abs(x - c) + (a - half) / std::max(a - b, 1e-300);
  };
  const double hwhm = 0.5 * (crossing(-1) + crossing(1));
  return std::max(hwhm / std::sqrt(2.0 * std::log(2.0)), 0.5);
}

}  // namespace

LaserProfile subpixel_refine(const Image& smoothed, const std::vector<int>& peaks, const ExtractParams& params) {
  LaserProfile profile;
  profile.width = smoothed.width();
  profile.height = smoothed.height();
  const int w = smoothed.width();
  const int hw = params.window_half_width();
  for (int y = 0; y < smoothed.height(); ++y) {
    ProfileRow r;
    r.row = y;
    const int p = y < static_cast<int>(peaks.size()) ? peaks[y] : -1;
    if (p < 0 || p >= w) {
      r.status = RowStatus::kNoLaser;
      profile.rows.push_back(r);
      continue;
    }
    const auto row = smoothed.row(y);
    // Window limited to the flanks that fall away from the peak, so a
    // neighboring stripe does not pull the fit.
    int lo = p;
    while (lo > std::max(0, p - hw) && row[lo - 1] <= row[lo]) --lo;
    int hi = p;
    while (hi < std::min(w - 1, p + hw) && row[hi + 1] <= row[hi]) ++hi;
    for (int x = std::max(0, p - hw); x <= std::min(w - 1, p + hw); ++x) {
      if (x == p) continue;
      const bool local_max = (x == 0 || row[x] >= row[x - 1]) && (x == w - 1 || row[x] > row[x + 1]);
      if (local_max && row[x] > params.multi_peak_ratio * row[p] && (x < lo || x > hi)) r.multi_peak = true;
    }
    if (hi - lo + 1 < 3) {
      lo = std::max(0, p - 1);
      hi = std::min(w - 1, p + 1);
    }
    std::vector<double> samples(row.begin() + lo, row.begin() + hi + 1);
    const GaussianFit fit = fit_gaussian_1d(samples, lo, p, sigma_from_half_max(row, p), params.lm);
    r.col = fit.center;
    r.amplitude = fit.amplitude;
    r.sigma = fit.sigma;
    const bool ok = fit.converged && fit.amplitude > 0.0 && fit.center >= p - hw && fit.center <= p + hw &&
                    fit.center >= 0.0 && fit.center < w && fit.sigma >= params.min_sigma &&
                    fit.sigma <= params.max_sigma;
    r.status = ok ? RowStatus::kValid : RowStatus::kFitFailed;
    profile.rows.push_back(r);
  }
  return profile;
}

LaserProfile extract_profile(const Image& rgb, LaserChannel channel, const ExtractParams& params) {
  Image diff = channel_difference(rgb, channel);
  if (params.transpose) diff = transpose(diff);
  const DiscretePeaks peaks = discrete_peaks(diff, params);
  LaserProfile profile = subpixel_refine(peaks.smoothed, peaks.peak, params);
  for (auto& r : profile.rows) r.candidates = peaks.candidates[r.row];
  profile.transposed = params.transpose;
  return profile;
}

double interpolate_depth(const Image& depth, const Pixel& px) {
  const int cx = static_cast<int>(std::lround(px.x()));
  const int cy = static_cast<int>(std::lround(px.y()));
  double sw = 0.0;
  double sd = 0.0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int x = cx + dx;
      const int y = cy + dy;
      if (x < 0 || y < 0 || x >= depth.width() || y >= depth.height()) continue;
      const double d = depth.at(x, y);
      if (!std::isfinite(d)) continue;
      const double wgt = 1.0 / (1e-6 + std::hypot(x - px.x(), y - px.y()));
      sw += wgt;
      sd += wgt * d;
    }
  }
  return sw > 0.0 ? sd / sw : std::numeric_limits<double>::quiet_NaN();
}

GroundTruthProfile ground_truth_profile(const Image& mask, const Image& depth, const ExtractParams& params) {
  GroundTruthProfile out;
  const Image m = params.transpose ? transpose(mask) : mask;
  const Image d = params.transpose ? transpose(depth) : depth;
  out.profile.width = m.width();
  out.profile.height = m.height();
  out.profile.transposed = params.transpose;
  const int w = m.width();
  for (int y = 0; y < m.height(); ++y) {
    ProfileRow r;
    r.row = y;
    const auto row = m.row(y);
    int p = -1;
    double best = 0.0;
    for (int x = 0; x < w; ++x) {
      if (row[x] > best) {
        best = row[x];
        p = x;
      }
    }
    double z = std::numeric_limits<double>::quiet_NaN();
    if (p < 0) {
      r.status = RowStatus::kNoLaser;
    } else {
      int lo = p;
      while (lo > 0 && row[lo - 1] > 0.0) --lo;
      int hi = p;
      while (hi < w - 1 && row[hi + 1] > 0.0) ++hi;
      int segments = 0;
      for (int x = 0; x < w; ++x) {
        if (row[x] > 0.0 && (x == 0 || row[x - 1] == 0.0)) ++segments;
      }
      r.candidates = segments;
      if (hi - lo + 1 < 3) {
        r.status = RowStatus::kThinMask;
      } else {
        std::vector<double> samples(row.begin() + lo, row.begin() + hi + 1);
        const GaussianFit fit = fit_gaussian_1d(samples, lo, p, sigma_from_half_max(row, p), params.lm);
        r.col = fit.center;
        r.amplitude = fit.amplitude;
        r.sigma = fit.sigma;
        const bool ok = fit.converged && fit.amplitude > 0.0 && fit.center >= lo - 0.5 && fit.center <= hi + 0.5;
        r.status = ok ? RowStatus::kValid : RowStatus::kFitFailed;
        if (ok) z = interpolate_depth(d, Pixel(r.col, y));
        if (ok && !std::isfinite(z)) r.status = RowStatus::kFitFailed;
      }
    }
    out.profile.rows.push_back(r);
    out.depth.push_back(z);
  }
  return out;
}

}  // namespace vlscan
