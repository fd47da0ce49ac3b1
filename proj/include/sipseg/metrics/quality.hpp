#pragma once

#include <limits>

#include "sipseg/image.hpp"

namespace sipseg::metrics {

double mse(const GrayImage& a, const GrayImage& b);

/// 10 log10(1/MSE) on the [0,1] scale; identical images give +infinity.
double psnr(const GrayImage& ref, const GrayImage& img);

struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

/// Mean SSIM over every full window position (no padding).
double ssim(const GrayImage& ref, const GrayImage& img, const SsimConfig& cfg = {});

}  // namespace sipseg::metrics
