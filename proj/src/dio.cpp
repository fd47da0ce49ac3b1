#include <cmath>
#include <numbers>
#include <vector>

#include "sampling.hpp"
#include "sipseg/periocular.hpp"
#include "sipseg/reference.hpp"

namespace sipseg {
namespace {

constexpr int kMaskSmoothing = 5;

struct AngleTable {
  std::vector<double> cos, sin;
  explicit AngleTable(int samples) : cos(samples), sin(samples) {
    for (int k = 0; k < samples; ++k) {
      const double a = 2.0 * std::numbers::pi * k / samples;
      cos[k] = std::cos(a);
      sin[k] = std::sin(a);
    }
  }
};

double circle_mean(const GrayImage& img, double cx, double cy, double r, const AngleTable& t) {
  // Offsets from the first sample, so a flat ring averages to exactly its value.
  const std::size_t n = t.cos.size();
  const double base = detail::bilinear_clamped(img, cx + r * t.cos[0], cy + r * t.sin[0]);
  double acc = 0;
  for (std::size_t k = 1; k < n; ++k) {
    acc += detail::bilinear_clamped(img, cx + r * t.cos[k], cy + r * t.sin[k]) - base;
  }
  return base + acc / static_cast<double>(n);
}

std::vector<double> gaussian_taps(double sigma) {
  if (!(sigma > 0)) return {1.0};
  const int half = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> g(2 * half + 1);
  for (int i = -half; i <= half; ++i) g[i + half] = std::exp(-0.5 * i * i / (sigma * sigma));
  return g;
}

int effective_r_max(const GrayImage& img, const DioConfig& cfg) {
  return cfg.r_max > 0 ? cfg.r_max : static_cast<int>(std::floor(0.25 * std::min(img.width(), img.height())));
}

// Largest radius whose circle stays inside the frame at this center.
int room(const GrayImage& img, int cx, int cy) {
  return std::min(std::min(cx, cy), std::min(img.width() - 1 - cx, img.height() - 1 - cy));
}

RadialResponse response_at(const GrayImage& img, int cx, int cy, int r_min, int r_max,
                           bool dark_inside, const std::vector<double>& taps, const AngleTable& angles,
                           std::vector<double>& scratch) {
  RadialResponse best;
  const int r_hi = std::min(r_max, room(img, cx, cy));
  if (r_hi < r_min + 1) return best;
  const int n = r_hi - r_min;  // number of forward differences
  scratch.resize(static_cast<std::size_t>(2 * n + 1));
  double* mean = scratch.data();
  double* diff = scratch.data() + n + 1;
  for (int i = 0; i <= n; ++i) mean[i] = circle_mean(img, cx, cy, r_min + i, angles);
  for (int i = 0; i < n; ++i) diff[i] = mean[i + 1] - mean[i];
  const int half = static_cast<int>(taps.size() / 2);
  for (int i = 0; i < n; ++i) {
    // Truncated, renormalized Gaussian along the radius axis.
    double acc = 0, wsum = 0;
    for (int k = -half; k <= half; ++k) {
      const int j = i + k;
      if (j < 0 || j >= n) continue;
      acc += taps[k + half] * diff[j];
      wsum += taps[k + half];
    }
    const double d = acc / wsum;
    const double s = dark_inside ? d : std::abs(d);
    if (!best.valid || s >= best.response) {
      best.valid = true;
      best.response = s;
      best.radius = r_min + i + 0.5;
    }
  }
  return best;
}

bool better(const RadialResponse& a, const RadialResponse& b) {
  if (!a.valid) return false;
  if (!b.valid) return true;
  if (a.response != b.response) return a.response > b.response;
  return a.radius > b.radius;
}

void check_config(const GrayImage& img, const DioConfig& cfg, int r_max) {
  if (cfg.r_min < 1) fail(ErrorCode::InvalidArgument, "DIO minimum radius must be >= 1");
  if (r_max <= cfg.r_min) {
    fail(ErrorCode::InvalidArgument, "DIO r_max (" + std::to_string(r_max) + ") must exceed r_min (" +
                                         std::to_string(cfg.r_min) + ")");
  }
  if (cfg.samples < 8) fail(ErrorCode::InvalidArgument, "DIO needs at least 8 angular samples");
  if (cfg.coarse_stride < 1 || cfg.refine_half < 0) fail(ErrorCode::InvalidArgument, "bad DIO search grid");
  if (std::min(img.width(), img.height()) < 2 * (cfg.r_min + 1) + 1) {
    fail(ErrorCode::InvalidArgument, "image too small for the DIO radius range");
  }
}

}  // namespace

double circular_mean(const GrayImage& img, double cx, double cy, double r, int samples) {
  return circle_mean(img, cx, cy, r, AngleTable(samples));
}

RadialResponse radial_response(const GrayImage& img, int cx, int cy, const DioConfig& cfg) {
  const int r_max = effective_r_max(img, cfg);
  check_config(img, cfg, r_max);
  std::vector<double> scratch;
  return response_at(img, cx, cy, cfg.r_min, r_max, cfg.dark_inside, gaussian_taps(cfg.sigma),
                     AngleTable(cfg.samples), scratch);
}

PupilCircle dio_locate_pupil(const GrayImage& img, const DioConfig& cfg) {
  const int r_max = effective_r_max(img, cfg);
  check_config(img, cfg, r_max);
  const auto taps = gaussian_taps(cfg.sigma);
  const AngleTable angles(cfg.samples);

  const int s = cfg.coarse_stride;
  const int gx = (img.width() + s - 1) / s;
  const int gy = (img.height() + s - 1) / s;
  std::vector<RadialResponse> coarse(static_cast<std::size_t>(gx) * gy);
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(dynamic, 4)
    for (int j = 0; j < gy; ++j) {
      for (int i = 0; i < gx; ++i) {
        coarse[static_cast<std::size_t>(j) * gx + i] =
            response_at(img, i * s, j * s, cfg.r_min, r_max, cfg.dark_inside, taps, angles, scratch);
      }
    }
  }
  // Serial reduction in scan order keeps the result independent of thread count.
  RadialResponse best;
  int bx = 0, by = 0;
  for (int j = 0; j < gy; ++j) {
    for (int i = 0; i < gx; ++i) {
      const auto& c = coarse[static_cast<std::size_t>(j) * gx + i];
      if (better(c, best)) {
        best = c;
        bx = i * s;
        by = j * s;
      }
    }
  }
  if (!best.valid) fail(ErrorCode::InvalidArgument, "no admissible DIO center");

  std::vector<double> scratch;
  const int cx0 = bx, cy0 = by;
  for (int y = cy0 - cfg.refine_half; y <= cy0 + cfg.refine_half; ++y) {
    for (int x = cx0 - cfg.refine_half; x <= cx0 + cfg.refine_half; ++x) {
      if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) continue;
      const auto c = response_at(img, x, y, cfg.r_min, r_max, cfg.dark_inside, taps, angles, scratch);
      if (better(c, best)) {
        best = c;
        bx = x;
        by = y;
      }
    }
  }
  if (best.response < cfg.response_floor) {
    fail(ErrorCode::NoContour, "no circular contour above the response floor (best " +
                                   std::to_string(best.response) + ")");
  }
  return {static_cast<double>(bx), static_cast<double>(by), best.radius, best.response};
}

PupilCircle dio_locate_pupil(const BinaryMask& mask, const DioConfig& cfg) {
  // A light box blur keeps isolated mask pixels from posing as tiny circles.
  // The mask marks dark pixels, so its complement has a dark pupil; a thin
  // threshold ring around an unmarked pupil core then only counts once, at its
  // outer edge. Polarity is forced here whatever the caller asked for.
  DioConfig c = cfg;
  c.dark_inside = true;
  return dio_locate_pupil(invert(local_mean(mask_to_gray(mask), kMaskSmoothing)), c);
}

namespace reference {

PupilCircle dio_exhaustive(const GrayImage& img, const DioConfig& cfg) {
  const int r_max = effective_r_max(img, cfg);
  check_config(img, cfg, r_max);
  const auto taps = gaussian_taps(cfg.sigma);
  const AngleTable angles(cfg.samples);
  std::vector<double> scratch;
  RadialResponse best;
  int bx = 0, by = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto c = response_at(img, x, y, cfg.r_min, r_max, cfg.dark_inside, taps, angles, scratch);
      if (better(c, best)) {
        best = c;
        bx = x;
        by = y;
      }
    }
  }
  if (!best.valid || best.response < cfg.response_floor) {
    fail(ErrorCode::NoContour, "no circular contour above the response floor");
  }
  return {static_cast<double>(bx), static_cast<double>(by), best.radius, best.response};
}

}  // namespace reference
}  // namespace sipseg
