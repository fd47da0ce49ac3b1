#include "sipseg/metrics/quality.hpp"

#include <cmath>
#include <vector>

namespace sipseg::metrics {
namespace {

// Valid-region separable filter of a row-major w x h field.
std::vector<double> filter_valid(const std::vector<double>& f, int w, int h, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1, oh = h - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h), out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += k[i] * f[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double mse(const GrayImage& a, const GrayImage& b) {
  require_same_shape(a, b, "mse");
  double s = 0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = pa[i] - pb[i];
    s += d * d;
  }
  return s / static_cast<double>(pa.size());
}

double psnr(const GrayImage& ref, const GrayImage& img) {
  const double m = mse(ref, img);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / m);
}

double ssim(const GrayImage& ref, const GrayImage& img, const SsimConfig& cfg) {
  require_same_shape(ref, img, "ssim");
  if (cfg.window < 1 || ref.width() < cfg.window || ref.height() < cfg.window) {
    fail(ErrorCode::InvalidArgument, "ssim needs images of at least " + std::to_string(cfg.window) + "x" +
                                         std::to_string(cfg.window));
  }
  std::vector<double> k(static_cast<std::size_t>(cfg.window));
  const double mid = 0.5 * (cfg.window - 1);
  double ks = 0;
  for (int i = 0; i < cfg.window; ++i) {
    k[i] = std::exp(-0.5 * (i - mid) * (i - mid) / (cfg.sigma * cfg.sigma));
    ks += k[i];
  }
  for (double& v : k) v /= ks;

  const int w = ref.width(), h = ref.height();
  std::vector<double> x(ref.pixels().begin(), ref.pixels().end()), y(img.pixels().begin(), img.pixels().end());
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, w, h, k), my = filter_valid(y, w, h, k);
  const auto sxx = filter_valid(xx, w, h, k), syy = filter_valid(yy, w, h, k), sxy = filter_valid(xy, w, h, k);
  const double c1 = cfg.k1 * cfg.k1, c2 = cfg.k2 * cfg.k2;
  double total = 0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cxy = sxy[i] - mx[i] * my[i];
    total += ((2 * mx[i] * my[i] + c1) * (2 * cxy + c2)) / ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

}  // namespace sipseg::metrics
