#pragma once

#include "sipseg/image.hpp"

namespace sipseg {

enum class Polarity { Bright, Dark };

struct AdaptiveThresholdConfig {
  double sensitivity = 0.5;
  Polarity polarity = Polarity::Bright;
  /// Odd window side; 0 selects the largest odd value <= min(W,H)/8 (at least 3).
  int window = 0;
  /// Slope of the sensitivity-to-threshold map.
  double lambda = 0.6;
};

int default_threshold_window(int width, int height);

/// Windowed mean through a summed-area table over an edge-replicated border.
GrayImage local_mean(const GrayImage& img, int window);

/// Bright: p > mu*(1 + lambda*(0.5 - s)). Dark: p < mu*(1 - lambda*(0.5 - s)).
BinaryMask adaptive_threshold(const GrayImage& img, const AdaptiveThresholdConfig& cfg);

/// Union of Euclidean disks dx^2 + dy^2 <= r^2 around each foreground pixel.
BinaryMask dilate_disk(const BinaryMask& mask, int radius);

/// Grayscale hole filling: every pixel is raised to the lowest level at which
/// it connects (4-neighbourhood) to the border.
GrayImage fill_holes(const GrayImage& img);

struct ReflectionConfig {
  double sensitivity = 0.0;
  int dilate_radius = 2;
  int window = 0;
  double lambda = 0.6;
};

struct ReflectionResult {
  GrayImage image;
  BinaryMask holes;
};

/// Replaces the dilated bright-hole pixels with the hole-filled image of the
/// complement, which flattens enclosed bright spots to their surround.
ReflectionResult remove_ocular_reflections(const GrayImage& e, const ReflectionConfig& cfg = {});

struct NlmConfig {
  /// Decay of the patch weights on the [0,1] intensity scale.
  double h = 7.0 / 255.0;
  int search = 25;
  int comparison = 17;
  /// Noise variance subtracted from the patch distance (twice) before decay.
  double noise_variance = 0.0;
};

void validate(const NlmConfig& cfg);

/// Weight exp(-max(d2 - 2 sigma^2, 0)/h^2), d2 the mean squared patch
/// difference over the comparison window.
double nlm_weight(double mean_sq_distance, const NlmConfig& cfg);

GrayImage nlm_filter(const GrayImage& img, const NlmConfig& cfg = {});

}  // namespace sipseg
