#pragma once

#include <cmath>

#include "sipseg/image.hpp"

namespace sipseg::detail {

/// Bilinear sample with clamp-to-edge addressing. Integer coordinates return
/// the stored pixel bit-exactly.
template <typename Img>
double bilinear_clamped(const Img& img, double x, double y) {
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const double ax = x - fx0;
  const double ay = y - fy0;
  const double v00 = img.clamped(x0, y0);
  const double v10 = img.clamped(x0 + 1, y0);
  const double v01 = img.clamped(x0, y0 + 1);
  const double v11 = img.clamped(x0 + 1, y0 + 1);
  const double top = v00 + ax * (v10 - v00);
  const double bottom = v01 + ax * (v11 - v01);
  return top + ay * (bottom - top);
}

/// Bilinear sample that returns `fill` outside [0,W-1] x [0,H-1].
template <typename Img>
double bilinear_or(const Img& img, double x, double y, double fill) {
  if (!(x >= 0.0 && y >= 0.0 && x <= img.width() - 1 && y <= img.height() - 1)) return fill;
  return bilinear_clamped(img, x, y);
}

inline double center_x(int width) { return 0.5 * (width - 1); }
inline double center_y(int height) { return 0.5 * (height - 1); }

}  // namespace sipseg::detail
