#include "sipseg/reference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sipseg::reference {

GrayImage local_mean(const GrayImage& img, int window) {
  if (window < 3 || window % 2 == 0) fail(ErrorCode::InvalidArgument, "window must be odd and >= 3");
  const int r = window / 2;
  GrayImage mu(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double s = 0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) s += img.clamped(x + dx, y + dy);
      }
      mu(x, y) = s / (static_cast<double>(window) * window);
    }
  }
  return mu;
}

BinaryMask adaptive_threshold(const GrayImage& img, const AdaptiveThresholdConfig& cfg) {
  const int window = cfg.window > 0 ? cfg.window : default_threshold_window(img.width(), img.height());
  const GrayImage mu = reference::local_mean(img, window);
  const double shift = cfg.lambda * (0.5 - cfg.sensitivity);
  BinaryMask out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const bool on = cfg.polarity == Polarity::Bright ? img(x, y) > mu(x, y) * (1.0 + shift)
                                                       : img(x, y) < mu(x, y) * (1.0 - shift);
      out(x, y) = on ? 1 : 0;
    }
  }
  return out;
}

BinaryMask dilate_disk(const BinaryMask& mask, int radius) {
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y)) continue;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (dx * dx + dy * dy > radius * radius) continue;
          if (xx < 0 || yy < 0 || xx >= mask.width() || yy >= mask.height()) continue;
          out(xx, yy) = 1;
        }
      }
    }
  }
  return out;
}

GrayImage fill_holes(const GrayImage& img) {
  // Marker: the image on the border, the maximum everywhere else; erode
  // (4-neighbourhood) under the constraint marker >= img until stable.
  const int W = img.width(), H = img.height();
  double top = 0;
  for (double v : img.pixels()) top = std::max(top, v);
  GrayImage m(W, H, top);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (x == 0 || y == 0 || x == W - 1 || y == H - 1) m(x, y) = img(x, y);
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        double lo = m(x, y);
        if (x > 0) lo = std::min(lo, m(x - 1, y));
        if (x < W - 1) lo = std::min(lo, m(x + 1, y));
        if (y > 0) lo = std::min(lo, m(x, y - 1));
        if (y < H - 1) lo = std::min(lo, m(x, y + 1));
        const double v = std::max(lo, img(x, y));
        if (v != m(x, y)) {
          m(x, y) = v;
          changed = true;
        }
      }
    }
  }
  return m;
}

GrayImage nlm_filter(const GrayImage& img, const NlmConfig& cfg) {
  validate(cfg);
  const int sr = cfg.search / 2, pr = cfg.comparison / 2;
  const double patch = static_cast<double>(cfg.comparison) * cfg.comparison;
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double num = 0, den = 0;
      for (int oy = -sr; oy <= sr; ++oy) {
        for (int ox = -sr; ox <= sr; ++ox) {
          double d2 = 0;
          for (int py = -pr; py <= pr; ++py) {
            for (int px = -pr; px <= pr; ++px) {
              const double d = img.clamped(x + px, y + py) - img.clamped(x + ox + px, y + oy + py);
              d2 += d * d;
            }
          }
          const double w = std::exp(-std::max(d2 / patch - 2.0 * cfg.noise_variance, 0.0) / (cfg.h * cfg.h));
          num += w * img.clamped(x + ox, y + oy);
          den += w;
        }
      }
      out(x, y) = std::clamp(num / den, 0.0, 1.0);
    }
  }
  return out;
}

GrayImage atmed_filter(const GrayImage& f, const AtmedConfig& cfg) {
  const int pw = cfg.padding();
  GrayImage out(f.width(), f.height());
  std::vector<double> win;
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      win.clear();
      for (int dy = -pw; dy <= pw; ++dy) {
        for (int dx = -pw; dx <= pw; ++dx) win.push_back(f.clamped(x + dx, y + dy));
      }
      std::vector<double> s = win;
      std::sort(s.begin(), s.end());
      const double lo = s.front(), hi = s.back(), med = s[s.size() / 2];
      double num = 0, den = 0;
      for (double v : win) {
        double w;
        if (v <= med) {
          w = med == lo ? 1.0 : 1.0 - (med - v) / (med - lo);
        } else {
          w = hi == med ? 1.0 : 1.0 - (v - med) / (hi - med);
        }
        num += w * v;
        den += w;
      }
      out(x, y) = num / den;
    }
  }
  return out;
}

net::Tensor conv3x3(const net::Tensor& x, const net::Tensor& weight) {
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3), O = weight.dim(0);
  net::Tensor y({N, O, H, W});
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t o = 0; o < O; ++o) {
      for (std::size_t i = 0; i < H; ++i) {
        for (std::size_t j = 0; j < W; ++j) {
          double s = 0;
          for (std::size_t c = 0; c < C; ++c) {
            for (int ki = 0; ki < 3; ++ki) {
              for (int kj = 0; kj < 3; ++kj) {
                const long ii = static_cast<long>(i) + ki - 1, jj = static_cast<long>(j) + kj - 1;
                if (ii < 0 || jj < 0 || ii >= static_cast<long>(H) || jj >= static_cast<long>(W)) continue;
                s += weight.at(o, c, ki, kj) * x.at(n, c, ii, jj);
              }
            }
          }
          y.at(n, o, i, j) = s;
        }
      }
    }
  }
  return y;
}

}  // namespace sipseg::reference
