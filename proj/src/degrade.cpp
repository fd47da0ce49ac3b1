#include "sipseg/degrade.hpp"

#include <cmath>
#include <numbers>

#include "sampling.hpp"

namespace sipseg {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

DistortionParams sample_distortion(const DistortionRanges& r, std::mt19937_64& rng) {
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::bernoulli_distribution coin(0.5);

  DistortionParams p;
  p.noise = coin(rng);
  p.scale = coin(rng);
  p.rotate = coin(rng);
  p.blur = coin(rng);
  if (!(p.noise || p.scale || p.rotate || p.blur)) {
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
      case 0: p.noise = true; break;
      case 1: p.scale = true; break;
      case 2: p.rotate = true; break;
      default: p.blur = true; break;
    }
  }
  // Values are always drawn so the stream does not depend on the coin flips.
  const double var = uni(r.noise_variance_min, r.noise_variance_max);
  const double scale = uni(r.scale_min, r.scale_max);
  const double rot = uni(r.rotation_min_deg, r.rotation_max_deg);
  std::uniform_int_distribution<int> len(r.blur_length_min, r.blur_length_max);
  const int lh = len(rng);
  const int lv = len(rng);
  const double theta = uni(r.blur_theta_min_deg, r.blur_theta_max_deg);
  p.noise_seed = rng();

  if (p.noise) p.noise_variance = var;
  if (p.scale) p.scale_factor = scale;
  if (p.rotate) p.rotation_deg = rot;
  if (p.blur) {
    p.blur_length_h = lh;
    p.blur_length_v = lv;
    p.blur_theta_deg = theta;
  }
  return p;
}

bool within(const DistortionRanges& r, const DistortionParams& p) {
  bool ok = true;
  if (p.noise) ok &= p.noise_variance >= r.noise_variance_min && p.noise_variance <= r.noise_variance_max;
  if (p.scale) ok &= p.scale_factor >= r.scale_min && p.scale_factor <= r.scale_max;
  if (p.rotate) ok &= p.rotation_deg >= r.rotation_min_deg && p.rotation_deg <= r.rotation_max_deg;
  if (p.blur) {
    ok &= p.blur_length_h >= r.blur_length_min && p.blur_length_h <= r.blur_length_max;
    ok &= p.blur_length_v >= r.blur_length_min && p.blur_length_v <= r.blur_length_max;
    ok &= p.blur_theta_deg >= r.blur_theta_min_deg && p.blur_theta_deg <= r.blur_theta_max_deg;
  }
  return ok && p.noise_mean == 0.0 && (p.noise || p.scale || p.rotate || p.blur);
}

SignedImage motion_kernel(int length, double theta_deg) {
  if (length < 1) fail(ErrorCode::InvalidArgument, "motion blur length must be >= 1");
  const int half = static_cast<int>(std::ceil(0.5 * (length - 1))) + 1;
  const int side = 2 * half + 1;
  SignedImage k(side, side, 0.0);
  const double c = std::cos(theta_deg * kDegToRad);
  const double s = std::sin(theta_deg * kDegToRad);
  // Splat unit samples along the segment, then normalize.
  for (int i = 0; i < length; ++i) {
    const double t = i - 0.5 * (length - 1);
    const double x = half + t * c;
    const double y = half - t * s;
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double ax = x - x0;
    const double ay = y - y0;
    k(x0, y0) += (1 - ax) * (1 - ay);
    k(x0 + 1, y0) += ax * (1 - ay);
    k(x0, y0 + 1) += (1 - ax) * ay;
    k(x0 + 1, y0 + 1) += ax * ay;
  }
  double sum = 0;
  for (double v : k.pixels()) sum += v;
  for (double& v : k.pixels()) v /= sum;
  return k;
}

GrayImage motion_blur(const GrayImage& img, int length, double theta_deg) {
  if (length == 1) return img;
  const SignedImage k = motion_kernel(length, theta_deg);
  const int half = k.width() / 2;
  GrayImage out(img.width(), img.height());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double v0 = img(x, y);
      double acc = 0;
      for (int ky = 0; ky < k.height(); ++ky) {
        for (int kx = 0; kx < k.width(); ++kx) {
          const double w = k(kx, ky);
          if (w != 0.0) acc += w * (img.clamped(x + kx - half, y + ky - half) - v0);
        }
      }
      out(x, y) = std::clamp(v0 + acc, 0.0, 1.0);
    }
  }
  return out;
}

GrayImage scale_about_center(const GrayImage& img, double factor) {
  if (!(factor > 0)) fail(ErrorCode::InvalidArgument, "scale factor must be positive");
  const double cx = detail::center_x(img.width());
  const double cy = detail::center_y(img.height());
  GrayImage out(img.width(), img.height());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out(x, y) = detail::bilinear_clamped(img, cx + (x - cx) / factor, cy + (y - cy) / factor);
    }
  }
  return out;
}

GrayImage rotate_about_center(const GrayImage& img, double degrees) {
  const double cx = detail::center_x(img.width());
  const double cy = detail::center_y(img.height());
  const double c = std::cos(degrees * kDegToRad);
  const double s = std::sin(degrees * kDegToRad);
  GrayImage out(img.width(), img.height());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double dx = x - cx, dy = y - cy;
      out(x, y) = detail::bilinear_clamped(img, cx + c * dx - s * dy, cy + s * dx + c * dy);
    }
  }
  return out;
}

GrayImage apply_distortion(const GrayImage& x, const DistortionParams& p) {
  GrayImage y = x;
  if (p.scale) y = scale_about_center(y, p.scale_factor);
  if (p.rotate) y = rotate_about_center(y, p.rotation_deg);
  if (p.blur) {
    y = motion_blur(y, p.blur_length_h, p.blur_theta_deg);
    y = motion_blur(y, p.blur_length_v, p.blur_theta_deg + 90.0);
  }
  if (p.noise) {
    std::mt19937_64 rng(p.noise_seed);
    std::normal_distribution<double> noise(p.noise_mean, std::sqrt(p.noise_variance));
    for (double& v : y.pixels()) v = std::clamp(v + noise(rng), 0.0, 1.0);
  }
  return y;
}

GrayImage degrade_image(const GrayImage& x, const DistortionRanges& ranges, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return apply_distortion(x, sample_distortion(ranges, rng));
}

SignedImage residual(const GrayImage& y, const GrayImage& x) {
  require_same_shape(y, x, "residual");
  SignedImage r(y.width(), y.height());
  auto a = y.pixels(), b = x.pixels();
  auto d = r.pixels();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
  return r;
}

GrayImage reconstruct(const GrayImage& y, const SignedImage& r) {
  require_same_shape(y, r, "reconstruct");
  GrayImage x(y.width(), y.height());
  auto a = y.pixels();
  auto b = r.pixels();
  auto d = x.pixels();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::clamp(a[i] - b[i], 0.0, 1.0);
  return x;
}

std::vector<PatchPair> extract_patch_pairs(const GrayImage& x, const GrayImage& y, int count,
                                           std::uint64_t seed, int patch_size) {
  require_same_shape(x, y, "extract_patch_pairs");
  if (count < 0) fail(ErrorCode::InvalidArgument, "patch count must be >= 0");
  if (x.width() < patch_size || x.height() < patch_size) {
    fail(ErrorCode::InvalidArgument, "image smaller than a " + std::to_string(patch_size) + "px patch");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> row(0, x.height() - patch_size);
  std::uniform_int_distribution<int> col(0, x.width() - patch_size);
  std::vector<PatchPair> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    PatchPair p{GrayImage(patch_size, patch_size), SignedImage(patch_size, patch_size), row(rng), col(rng)};
    for (int j = 0; j < patch_size; ++j) {
      for (int i = 0; i < patch_size; ++i) {
        const double yv = y(p.col + i, p.row + j);
        p.degraded(i, j) = yv;
        p.residual(i, j) = yv - x(p.col + i, p.row + j);
      }
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

double half_mse(const SignedImage& r, const SignedImage& t) {
  require_same_shape(r, t, "half_mse");
  // Neumaier-compensated, so large patches do not drift with summation order.
  double sum = 0, comp = 0;
  auto a = r.pixels(), b = t.pixels();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    const double term = d * d;
    const double next = sum + term;
    comp += std::abs(sum) >= term ? (sum - next) + term : (term - next) + sum;
    sum = next;
  }
  return 0.5 * (sum + comp);
}

double half_mse(const std::vector<SignedImage>& r, const std::vector<SignedImage>& t) {
  if (r.size() != t.size() || r.empty()) {
    fail(ErrorCode::ShapeMismatch, "half_mse needs equally sized, non-empty batches");
  }
  double sum = 0;
  for (std::size_t i = 0; i < r.size(); ++i) sum += half_mse(r[i], t[i]);
  return sum / static_cast<double>(r.size());
}

}  // namespace sipseg
