#include "sipseg/periocular.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sipseg {

BinaryMask disk_mask(int width, int height, const PupilCircle& c) {
  BinaryMask m(width, height);
  const double r2 = c.radius * c.radius;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x - c.x, dy = y - c.y;
      m(x, y) = dx * dx + dy * dy <= r2 ? 1 : 0;
    }
  }
  return m;
}

PeriocularResult extract_periocular_mask(const GrayImage& e, const PeriocularConfig& cfg) {
  PeriocularResult res;
  res.with_pupil = adaptive_threshold(e, cfg.threshold);
  res.periocular = res.with_pupil;
  try {
    const PupilCircle pupil = dio_locate_pupil(res.with_pupil, cfg.dio);
    PupilCircle cut = pupil;
    cut.radius += cfg.pupil_margin;
    const BinaryMask disk = disk_mask(e.width(), e.height(), cut);
    auto p = res.periocular.pixels();
    auto d = disk.pixels();
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = (p[i] && !d[i]) ? 1 : 0;
    res.pupil = pupil;
    res.pupil_found = true;
  } catch (const Error& err) {
    res.warning = std::string("pupil not found: ") + err.what();
  }
  return res;
}

double atmed_weight(double v, double lo, double med, double hi) {
  if (v <= med) {
    const double den = med - lo;
    return den == 0.0 ? 1.0 : 1.0 - (med - v) / den;
  }
  const double den = hi - med;
  return den == 0.0 ? 1.0 : 1.0 - (v - med) / den;
}

GrayImage atmed_filter(const GrayImage& f, const AtmedConfig& cfg) {
  if (cfg.window < 1 || cfg.window % 2 == 0) {
    fail(ErrorCode::InvalidArgument, "ATMED window must be odd, got " + std::to_string(cfg.window));
  }
  const int pw = cfg.padding();
  const std::size_t n = static_cast<std::size_t>(cfg.window) * cfg.window;
  GrayImage out(f.width(), f.height());
#pragma omp parallel
  {
    std::vector<double> win(n), sorted(n);
#pragma omp for schedule(static)
    for (int y = 0; y < f.height(); ++y) {
      for (int x = 0; x < f.width(); ++x) {
        std::size_t k = 0;
        for (int dy = -pw; dy <= pw; ++dy) {
          for (int dx = -pw; dx <= pw; ++dx) win[k++] = f.clamped(x + dx, y + dy);
        }
        sorted = win;
        auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(n / 2);
        std::nth_element(sorted.begin(), mid, sorted.end());
        const double med = *mid;
        const double lo = *std::min_element(sorted.begin(), mid + 1);
        const double hi = *std::max_element(mid, sorted.end());
        const double c = f(x, y);
        double num = 0, den = 0;
        for (double v : win) {
          const double w = atmed_weight(v, lo, med, hi);
          num += w * (v - c);
          den += w;
        }
        out(x, y) = std::clamp(c + num / den, lo, hi);
      }
    }
  }
  return out;
}

GrayImage suppress_periocular(const GrayImage& f, const GrayImage& fz, const BinaryMask& p) {
  require_same_shape(f, fz, "suppress_periocular");
  require_same_shape(f, p, "suppress_periocular");
  GrayImage out = f;
  auto m = p.pixels();
  auto src = fz.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (m[i]) dst[i] = src[i];
  }
  return out;
}

}  // namespace sipseg
