#include "sipseg/augment.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "sampling.hpp"

namespace sipseg {
namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

AugmentationParams sample_augmentation(std::uint64_t seed, const AugmentationRanges& r) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(r.flip_probability);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  AugmentationParams p;
  p.flip_x = coin(rng);
  p.flip_y = coin(rng);
  p.rotation_deg = uni(r.rotation_min_deg, r.rotation_max_deg);
  p.scale = uni(r.scale_min, r.scale_max);
  p.dx = uni(r.translate_min, r.translate_max);
  p.dy = uni(r.translate_min, r.translate_max);
  return p;
}

bool within(const AugmentationRanges& r, const AugmentationParams& p) {
  return p.rotation_deg >= r.rotation_min_deg && p.rotation_deg <= r.rotation_max_deg &&
         p.scale >= r.scale_min && p.scale <= r.scale_max && p.dx >= r.translate_min &&
         p.dx <= r.translate_max && p.dy >= r.translate_min && p.dy <= r.translate_max;
}

std::uint64_t augmentation_seed(std::uint64_t base, std::uint64_t epoch, std::uint64_t index) {
  return splitmix(splitmix(splitmix(base) ^ epoch) ^ index);
}

AugmentedSample apply_augmentation(const GrayImage& img, const LabelMap& labels,
                                   const AugmentationParams& p) {
  require_same_shape(img, labels, "apply_augmentation");
  if (!(p.scale > 0.0) || !std::isfinite(p.rotation_deg) || !std::isfinite(p.dx) || !std::isfinite(p.dy)) {
    fail(ErrorCode::InvalidArgument, "augmentation needs a positive scale and finite parameters");
  }
  const int w = img.width();
  const int h = img.height();
  const double cx = detail::center_x(w);
  const double cy = detail::center_y(h);
  const double th = p.rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(th);
  const double s = std::sin(th);

  AugmentedSample out{GrayImage(w, h, 0.0), LabelMap(w, h, 0)};
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Undo translate, scale, rotate and flip, in that order.
      const double ux = (x - p.dx - cx) / p.scale;
      const double uy = (y - p.dy - cy) / p.scale;
      double sx = cx + (c * ux + s * uy);
      double sy = cy + (-s * ux + c * uy);
      if (p.flip_x) sx = (w - 1) - sx;
      if (p.flip_y) sy = (h - 1) - sy;
      out.image(x, y) = detail::bilinear_or(img, sx, sy, 0.0);
      const double nx = std::round(sx);
      const double ny = std::round(sy);
      if (nx >= 0 && ny >= 0 && nx <= w - 1 && ny <= h - 1) {
        out.labels(x, y) = labels(static_cast<int>(nx), static_cast<int>(ny));
      }
    }
  }
  return out;
}

}  // namespace sipseg
