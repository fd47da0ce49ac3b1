#include "sipseg/enhance.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace sipseg {

double quantile(std::span<const double> values, double q) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "quantile of an empty set");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

StretchLimits stretch_limits(const GrayImage& img, double tail) {
  if (!(tail >= 0.0 && tail < 0.5)) fail(ErrorCode::InvalidArgument, "tail must lie in [0, 0.5)");
  StretchLimits lim;
  lim.low_in = quantile(img.pixels(), tail);
  lim.high_in = quantile(img.pixels(), 1.0 - tail);
  if (!(lim.low_in < lim.high_in)) {
    fail(ErrorCode::DegenerateInput, "stretch limits collapse on a constant image");
  }
  return lim;
}

GrayImage linear_map(const GrayImage& img, const StretchLimits& lim) {
  if (!(lim.low_in < lim.high_in) || !(lim.low_out < lim.high_out)) {
    fail(ErrorCode::InvalidArgument, "stretch limits must be increasing");
  }
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  const double slope = (lim.high_out - lim.low_out) / (lim.high_in - lim.low_in);
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double v = src[i];
    if (v <= lim.low_in) {
      dst[i] = lim.low_out;
    } else if (v >= lim.high_in) {
      dst[i] = lim.high_out;
    } else {
      dst[i] = std::clamp(lim.low_out + (v - lim.low_in) * slope, lim.low_out, lim.high_out);
    }
  }
  return out;
}

double contrast_stretch_value(double v, double mean, double exponent) {
  if (v <= 0.0) return 0.0;
  return 1.0 / (1.0 + std::pow(mean / v, exponent));
}

GrayImage contrast_stretch(const GrayImage& img, double exponent) {
  if (!(exponent > 0)) fail(ErrorCode::InvalidArgument, "contrast exponent must be positive");
  auto src = img.pixels();
  const double mean = std::accumulate(src.begin(), src.end(), 0.0) / static_cast<double>(src.size());
  GrayImage out(img.width(), img.height());
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = contrast_stretch_value(src[i], mean, exponent);
  return out;
}

Histogram histogram(const GrayImage& img) {
  Histogram h{};
  for (double v : img.pixels()) ++h[hist_bin(v)];
  return h;
}

double shannon_entropy(const GrayImage& img) {
  const Histogram h = histogram(img);
  const double n = static_cast<double>(img.size());
  double e = 0;
  for (auto c : h) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    e -= p * std::log2(p);
  }
  return e;
}

namespace {

using Lut = std::array<double, kHistBins>;

// Raw CDF lookup: bin b maps to the fraction of counts at or below b.
Lut cdf_lut(const Histogram& h) {
  Lut lut{};
  std::size_t total = 0;
  for (auto c : h) total += c;
  std::size_t run = 0;
  for (int b = 0; b < kHistBins; ++b) {
    run += h[b];
    lut[b] = static_cast<double>(run) / static_cast<double>(total);
  }
  return lut;
}

}  // namespace

GrayImage hist_equalize(const GrayImage& img) {
  const Lut lut = cdf_lut(histogram(img));
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lut[hist_bin(src[i])];
  return out;
}

std::size_t clip_histogram(Histogram& hist, std::size_t clip) {
  std::size_t excess = 0;
  for (auto& c : hist) {
    if (c > clip) {
      excess += c - clip;
      c = clip;
    }
  }
  const std::size_t each = excess / kHistBins;
  const std::size_t rest = excess % kHistBins;
  for (auto& c : hist) c += each;
  if (rest > 0) {
    const std::size_t stride = std::max<std::size_t>(1, kHistBins / rest);
    for (std::size_t b = 0, given = 0; b < kHistBins && given < rest; b += stride, ++given) ++hist[b];
  }
  return excess;
}

GrayImage clahe(const GrayImage& img, const ClaheConfig& cfg) {
  const int t = cfg.tile;
  if (t < 2) fail(ErrorCode::InvalidArgument, "CLAHE tile must be >= 2 pixels");
  if (!(cfg.clip_limit > 0.0 && cfg.clip_limit <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "CLAHE clip limit must lie in (0,1]");
  }
  if (img.width() < t || img.height() < t) {
    fail(ErrorCode::InvalidArgument, "image smaller than one CLAHE tile");
  }
  const int nx = (img.width() + t - 1) / t;
  const int ny = (img.height() + t - 1) / t;
  const std::size_t tile_pixels = static_cast<std::size_t>(t) * t;
  const auto clip = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(cfg.clip_limit * static_cast<double>(tile_pixels) + 1e-9)));

  // Each tile covers a full t x t block; partial edge tiles read replicated pixels.
  std::vector<Lut> luts(static_cast<std::size_t>(nx) * ny);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < nx * ny; ++k) {
    const int tx = k % nx, ty = k / nx;
    Histogram h{};
    for (int y = ty * t; y < (ty + 1) * t; ++y) {
      for (int x = tx * t; x < (tx + 1) * t; ++x) ++h[hist_bin(img.clamped(x, y))];
    }
    clip_histogram(h, clip);
    luts[static_cast<std::size_t>(k)] = cdf_lut(h);
  }

  GrayImage out(img.width(), img.height());
  const double half = 0.5 * (t - 1);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height(); ++y) {
    // Tile-center coordinates; pixels beyond the outer centers clamp to them.
    const double gy = std::clamp((y - half) / t, 0.0, static_cast<double>(ny - 1));
    const int ty0 = static_cast<int>(std::floor(gy));
    const int ty1 = std::min(ty0 + 1, ny - 1);
    const double ay = gy - ty0;
    for (int x = 0; x < img.width(); ++x) {
      const double gx = std::clamp((x - half) / t, 0.0, static_cast<double>(nx - 1));
      const int tx0 = static_cast<int>(std::floor(gx));
      const int tx1 = std::min(tx0 + 1, nx - 1);
      const double ax = gx - tx0;
      const int b = hist_bin(img(x, y));
      const double v00 = luts[static_cast<std::size_t>(ty0) * nx + tx0][b];
      const double v10 = luts[static_cast<std::size_t>(ty0) * nx + tx1][b];
      const double v01 = luts[static_cast<std::size_t>(ty1) * nx + tx0][b];
      const double v11 = luts[static_cast<std::size_t>(ty1) * nx + tx1][b];
      const double top = v00 + ax * (v10 - v00);
      const double bottom = v01 + ax * (v11 - v01);
      out(x, y) = std::clamp(top + ay * (bottom - top), 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace sipseg
