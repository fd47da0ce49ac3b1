#include "sipseg/restore.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace sipseg {
namespace {

void check_odd_window(int window, const char* what) {
  if (window < 3 || window % 2 == 0) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " window must be odd and >= 3, got " +
                                         std::to_string(window));
  }
}

// Summed-area table of the image padded by `pad` replicated pixels on every side.
// Values are offset by `base` so constant planes sum to exactly zero.
struct IntegralImage {
  int stride = 0;  // padded width + 1
  double base = 0;
  std::vector<double> sum;

  double box(int x0, int y0, int x1, int y1) const {  // half-open [x0,x1) x [y0,y1), padded coords
    return sum[static_cast<std::size_t>(y1) * stride + x1] - sum[static_cast<std::size_t>(y0) * stride + x1] -
           sum[static_cast<std::size_t>(y1) * stride + x0] + sum[static_cast<std::size_t>(y0) * stride + x0];
  }
};

IntegralImage padded_integral(const GrayImage& img, int pad) {
  const int pw = img.width() + 2 * pad;
  const int ph = img.height() + 2 * pad;
  IntegralImage ii;
  ii.stride = pw + 1;
  ii.base = img(0, 0);
  ii.sum.assign(static_cast<std::size_t>(ph + 1) * ii.stride, 0.0);
  for (int y = 0; y < ph; ++y) {
    double run = 0;
    for (int x = 0; x < pw; ++x) {
      run += img.clamped(x - pad, y - pad) - ii.base;
      ii.sum[static_cast<std::size_t>(y + 1) * ii.stride + x + 1] =
          ii.sum[static_cast<std::size_t>(y) * ii.stride + x + 1] + run;
    }
  }
  return ii;
}

}  // namespace

int default_threshold_window(int width, int height) {
  int w = std::min(width, height) / 8;
  if (w % 2 == 0) --w;
  return std::max(3, w);
}

GrayImage local_mean(const GrayImage& img, int window) {
  check_odd_window(window, "local mean");
  const int r = window / 2;
  const IntegralImage ii = padded_integral(img, r);
  const double inv = 1.0 / (static_cast<double>(window) * window);
  GrayImage mu(img.width(), img.height());
#pragma omp parallel for schedule(static)
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) mu(x, y) = ii.base + ii.box(x, y, x + window, y + window) * inv;
  }
  return mu;
}

BinaryMask adaptive_threshold(const GrayImage& img, const AdaptiveThresholdConfig& cfg) {
  if (!(cfg.sensitivity >= 0.0 && cfg.sensitivity <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "sensitivity must lie in [0,1]");
  }
  const int window = cfg.window > 0 ? cfg.window : default_threshold_window(img.width(), img.height());
  const GrayImage mu = local_mean(img, window);
  const double shift = cfg.lambda * (0.5 - cfg.sensitivity);
  BinaryMask mask(img.width(), img.height());
  auto p = img.pixels();
  auto m = mu.pixels();
  auto out = mask.pixels();
  if (cfg.polarity == Polarity::Bright) {
    const double factor = 1.0 + shift;
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] > m[i] * factor ? 1 : 0;
  } else {
    const double factor = 1.0 - shift;
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] < m[i] * factor ? 1 : 0;
  }
  return mask;
}

BinaryMask dilate_disk(const BinaryMask& mask, int radius) {
  if (radius < 0) fail(ErrorCode::InvalidArgument, "dilation radius must be >= 0");
  if (radius == 0) return mask;
  // Half-width of the disk on each row offset.
  std::vector<int> span(static_cast<std::size_t>(radius) + 1);
  for (int dy = 0; dy <= radius; ++dy) {
    int w = 0;
    while ((w + 1) * (w + 1) + dy * dy <= radius * radius) ++w;
    span[static_cast<std::size_t>(dy)] = w;
  }
  const int W = mask.width(), H = mask.height();
  BinaryMask out(W, H);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      bool hit = false;
      for (int dy = -radius; dy <= radius && !hit; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= H) continue;
        const int w = span[static_cast<std::size_t>(std::abs(dy))];
        for (int xx = std::max(0, x - w); xx <= std::min(W - 1, x + w); ++xx) {
          if (mask(xx, yy)) {
            hit = true;
            break;
          }
        }
      }
      out(x, y) = hit ? 1 : 0;
    }
  }
  return out;
}

GrayImage fill_holes(const GrayImage& img) {
  // Priority flood from the border: a pixel's filled level is the lowest
  // "water level" along any 4-connected path that reaches the border.
  const int W = img.width(), H = img.height();
  GrayImage out = img;
  std::vector<std::uint8_t> done(img.size(), 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  auto idx = [W](int x, int y) { return static_cast<std::size_t>(y) * W + x; };
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (x == 0 || y == 0 || x == W - 1 || y == H - 1) {
        done[idx(x, y)] = 1;
        heap.emplace(img(x, y), idx(x, y));
      }
    }
  }
  constexpr int kDx[4] = {1, -1, 0, 0};
  constexpr int kDy[4] = {0, 0, 1, -1};
  while (!heap.empty()) {
    const auto [level, i] = heap.top();
    heap.pop();
    const int x = static_cast<int>(i % W), y = static_cast<int>(i / W);
    for (int k = 0; k < 4; ++k) {
      const int nx = x + kDx[k], ny = y + kDy[k];
      if (nx < 0 || ny < 0 || nx >= W || ny >= H) continue;
      const std::size_t j = idx(nx, ny);
      if (done[j]) continue;
      done[j] = 1;
      const double v = std::max(img(nx, ny), level);
      out(nx, ny) = v;
      heap.emplace(v, j);
    }
  }
  return out;
}

ReflectionResult remove_ocular_reflections(const GrayImage& e, const ReflectionConfig& cfg) {
  AdaptiveThresholdConfig th{cfg.sensitivity, Polarity::Bright, cfg.window, cfg.lambda};
  ReflectionResult res{e, dilate_disk(adaptive_threshold(e, th), cfg.dilate_radius)};
  const GrayImage filled = invert(fill_holes(invert(e)));
  auto m = res.holes.pixels();
  auto src = filled.pixels();
  auto dst = res.image.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (m[i]) dst[i] = src[i];
  }
  return res;
}

void validate(const NlmConfig& cfg) {
  if (!(cfg.h > 0)) fail(ErrorCode::InvalidArgument, "NLM smoothing degree must be positive");
  check_odd_window(cfg.search, "NLM search");
  check_odd_window(cfg.comparison, "NLM comparison");
  if (cfg.comparison > cfg.search) {
    fail(ErrorCode::InvalidArgument, "NLM comparison window exceeds the search window");
  }
  if (!(cfg.noise_variance >= 0)) fail(ErrorCode::InvalidArgument, "NLM noise variance must be >= 0");
}

double nlm_weight(double mean_sq_distance, const NlmConfig& cfg) {
  const double d = std::max(mean_sq_distance - 2.0 * cfg.noise_variance, 0.0);
  return std::exp(-d / (cfg.h * cfg.h));
}

GrayImage nlm_filter(const GrayImage& img, const NlmConfig& cfg) {
  validate(cfg);
  const int W = img.width(), H = img.height();
  const int sr = cfg.search / 2;
  const int pr = cfg.comparison / 2;
  // Padded copy so every search/comparison read is a plain array access.
  const int pad = sr + pr;
  const int pw = W + 2 * pad, ph = H + 2 * pad;
  std::vector<double> padded(static_cast<std::size_t>(pw) * ph);
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) padded[static_cast<std::size_t>(y) * pw + x] = img.clamped(x - pad, y - pad);
  }
  auto P = [&](int x, int y) { return padded[static_cast<std::size_t>(y + pad) * pw + (x + pad)]; };

  // For a fixed offset the squared difference field is box-summed over the
  // comparison window with a summed-area table covering the image +- pr.
  const int aw = W + 2 * pr, ah = H + 2 * pr;
  const int stride = aw + 1;
  const double inv_patch = 1.0 / (static_cast<double>(cfg.comparison) * cfg.comparison);
  std::vector<double> num(img.size(), 0.0), den(img.size(), 0.0);
  std::vector<double> sat(static_cast<std::size_t>(ah + 1) * stride, 0.0);

  for (int oy = -sr; oy <= sr; ++oy) {
    for (int ox = -sr; ox <= sr; ++ox) {
      for (int y = 0; y < ah; ++y) {
        double run = 0;
        const int py = y - pr;
        for (int x = 0; x < aw; ++x) {
          const int px = x - pr;
          const double d = P(px, py) - P(px + ox, py + oy);
          run += d * d;
          sat[static_cast<std::size_t>(y + 1) * stride + x + 1] =
              sat[static_cast<std::size_t>(y) * stride + x + 1] + run;
        }
      }
#pragma omp parallel for schedule(static)
      for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
          // Window around (x,y) in SAT coords spans [x, x+2pr] x [y, y+2pr].
          const std::size_t y0 = static_cast<std::size_t>(y) * stride;
          const std::size_t y1 = static_cast<std::size_t>(y + cfg.comparison) * stride;
          const double box = sat[y1 + x + cfg.comparison] - sat[y0 + x + cfg.comparison] -
                             sat[y1 + x] + sat[y0 + x];
          const double w = nlm_weight(box * inv_patch, cfg);
          const std::size_t i = static_cast<std::size_t>(y) * W + x;
          num[i] += w * (P(x + ox, y + oy) - P(x, y));
          den[i] += w;
        }
      }
    }
  }
  GrayImage out(W, H);
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::clamp(src[i] + num[i] / den[i], 0.0, 1.0);
  return out;
}

}  // namespace sipseg
