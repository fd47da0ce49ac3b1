#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sipseg/image.hpp"

namespace sipseg {

struct ReflectionSpot {
  double x = 0;
  double y = 0;
  double radius = 0;
};

/// Geometry and photometry of one rendered eye. The pupil, iris annulus and
/// sclera ellipse share the pupil center.
struct SyntheticEyeSpec {
  int width = 160;
  int height = 160;
  double pupil_x = 80;
  double pupil_y = 80;
  double pupil_radius = 18;
  double iris_radius = 40;
  double sclera_axis_x = 70;
  double sclera_axis_y = 48;
  /// Intensity per class, indexed by EyeClass.
  double level[kNumClasses] = {0.55, 0.80, 0.42, 0.08};
  double noise_variance = 0.0;
  std::vector<ReflectionSpot> spots;
  int eyelash_strokes = 0;
  double eyelash_level = 0.12;
};

struct SyntheticEye {
  GrayImage image;
  LabelMap labels;
};

/// Throws GeometryOutOfBounds when the radii are not nested or any part
/// of the geometry leaves the frame.
void validate(const SyntheticEyeSpec& spec);

/// Pure function of (spec, seed).
SyntheticEye render_synthetic_eye(const SyntheticEyeSpec& spec, std::uint64_t seed);

/// Ranges cmd_synth draws from; every sampled spec satisfies validate().
struct SyntheticEyeRanges {
  int width = 160;
  int height = 160;
  double pupil_radius_min = 10;
  double pupil_radius_max = 40;
  double pupil_contrast_min = 0.3;
  double noise_variance_max = 0.005;
  int max_spots = 2;
  int max_eyelash_strokes = 12;
};

SyntheticEyeSpec sample_eye_spec(const SyntheticEyeRanges& ranges, std::uint64_t seed);

}  // namespace sipseg
