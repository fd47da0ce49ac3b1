#pragma once

#include <cstdint>

#include "sipseg/image.hpp"

namespace sipseg {

struct AugmentationParams {
  bool flip_x = false;
  bool flip_y = false;
  double rotation_deg = 0.0;
  double scale = 1.0;
  double dx = 0.0;
  double dy = 0.0;
};

struct AugmentationRanges {
  double flip_probability = 0.5;
  double rotation_min_deg = -30.0;
  double rotation_max_deg = 30.0;
  double scale_min = 1.2;
  double scale_max = 1.5;
  double translate_min = -20.0;
  double translate_max = 20.0;
};

AugmentationParams sample_augmentation(std::uint64_t seed, const AugmentationRanges& ranges = {});
bool within(const AugmentationRanges& ranges, const AugmentationParams& p);

/// Seed for sample `index` of `epoch`, so every epoch sees fresh parameters.
std::uint64_t augmentation_seed(std::uint64_t base, std::uint64_t epoch, std::uint64_t index);

struct AugmentedSample {
  GrayImage image;
  LabelMap labels;
};

/// Flip, rotate about the center, scale about the center, translate; the
/// image is sampled bilinearly and the labels by nearest neighbour through the
/// same inverse map. Uncovered pixels become 0 / class 0.
AugmentedSample apply_augmentation(const GrayImage& img, const LabelMap& labels,
                                   const AugmentationParams& p);

}  // namespace sipseg
