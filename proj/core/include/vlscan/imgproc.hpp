#pragma once

#include <vector>

#include "vlscan/image.hpp"

namespace vlscan {

// Normalized samples of a Gaussian on [-radius, radius].
std::vector<double> gaussian_kernel(double sigma, int radius);

// Separable Gaussian blur applied per channel, borders clamped. A negative
// radius selects ceil(3 sigma).
Image gaussian_blur(const Image& img, double sigma, int radius = -1);

Image extract_channel(const Image& img, int channel);

// Bilinear interpolation with clamped borders.
double sample_bilinear(const Image& img, double x, double y, int channel = 0);

Image transpose(const Image& img);

}  // namespace vlscan
