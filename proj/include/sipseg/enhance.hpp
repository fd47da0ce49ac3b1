#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "sipseg/image.hpp"

namespace sipseg {

inline constexpr int kHistBins = 256;

struct StretchLimits {
  double low_in = 0.0;
  double high_in = 1.0;
  double low_out = 0.0;
  double high_out = 1.0;
};

struct ClaheConfig {
  int tile = 20;
  double clip_limit = 0.005;
};

/// Quantile with linear interpolation between order statistics.
double quantile(std::span<const double> values, double q);

/// Tail quantiles of the intensities mapped onto [0,1]. Throws
/// DegenerateInput when the two input limits coincide.
StretchLimits stretch_limits(const GrayImage& img, double tail = 0.01);

GrayImage linear_map(const GrayImage& img, const StretchLimits& lim);

/// 1 / (1 + (m/v)^E) with m the image mean; v = 0 maps to 0.
GrayImage contrast_stretch(const GrayImage& img, double exponent = 3.0);
double contrast_stretch_value(double v, double mean, double exponent);

/// Bin of an intensity in the 256-level histogram.
inline int hist_bin(double v) {
  const long b = std::lround(v * 255.0);
  return static_cast<int>(std::clamp(b, 0L, 255L));
}

using Histogram = std::array<std::size_t, kHistBins>;
Histogram histogram(const GrayImage& img);
double shannon_entropy(const GrayImage& img);

GrayImage hist_equalize(const GrayImage& img);

/// Clips a histogram at `clip` counts per bin and spreads the excess evenly,
/// with the remainder handed out one count at a time at a fixed stride.
/// Returns the total excess that was redistributed.
std::size_t clip_histogram(Histogram& hist, std::size_t clip);

GrayImage clahe(const GrayImage& img, const ClaheConfig& cfg = {});

}  // namespace sipseg
