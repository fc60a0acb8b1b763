#include "vlscan/imgproc.hpp"

#include <algorithm>
#include <cmath>

#include "vlscan/error.hpp"

namespace vlscan {

std::vector<double> gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0) || radius < 0) throw Error(ErrorCode::kDomainError, "invalid Gaussian kernel");
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

Image gaussian_blur(const Image& img, double sigma, int radius) {
  if (radius < 0) radius = static_cast<int>(std::ceil(3.0 * sigma));
  const auto k = gaussian_kernel(sigma, radius);
  const int w = img.width();
  const int h = img.height();
  Image tmp(w, h, img.channels());
  Image out(w, h, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int i = -radius; i <= radius; ++i) s += k[i + radius] * img.at(std::clamp(x + i, 0, w - 1), y, c);
        tmp.at(x, y, c) = s;
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int i = -radius; i <= radius; ++i) s += k[i + radius] * tmp.at(x, std::clamp(y + i, 0, h - 1), c);
        out.at(x, y, c) = s;
      }
    }
  }
  return out;
}

Image extract_channel(const Image& img, int channel) {
  Image out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = img.at(x, y, channel);
  }
  return out;
}

double sample_bilinear(const Image& img, double x, double y, int channel) {
  x = std::clamp(x, 0.0, img.width() - 1.0);
  y = std::clamp(y, 0.0, img.height() - 1.0);
  const int x0 = std::min(static_cast<int>(x), img.width() - 2 < 0 ? 0 : img.width() - 2);
  const int y0 = std::min(static_cast<int>(y), img.height() - 2 < 0 ? 0 : img.height() - 2);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  return (1 - fx) * (1 - fy) * img.at(x0, y0, channel) + fx * (1 - fy) * img.at(x1, y0, channel) +
         (1 - fx) * fy * img.at(x0, y1, channel) + fx * fy * img.at(x1, y1, channel);
}

Image transpose(const Image& img) {
  Image out(img.height(), img.width(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(x, y, c);
    }
  }
  return out;
}

}  // namespace vlscan
