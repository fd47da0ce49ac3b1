#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sipseg/image.hpp"

namespace sipseg {

/// Sampling ranges for the four distortions; defaults are the published table.
struct DistortionRanges {
  double noise_variance_min = 0.005;
  double noise_variance_max = 0.015;
  double scale_min = 1.05;
  double scale_max = 1.10;
  double rotation_min_deg = -5.0;
  double rotation_max_deg = 5.0;
  int blur_length_min = 1;
  int blur_length_max = 9;
  double blur_theta_min_deg = -20.0;
  double blur_theta_max_deg = 20.0;
};

/// One concrete draw. Disabled distortions keep their neutral values.
struct DistortionParams {
  bool noise = false;
  bool scale = false;
  bool rotate = false;
  bool blur = false;
  double noise_mean = 0.0;
  double noise_variance = 0.0;
  double scale_factor = 1.0;
  double rotation_deg = 0.0;
  int blur_length_h = 1;
  int blur_length_v = 1;
  double blur_theta_deg = 0.0;
  /// Seed for the noise field, so apply() stays a pure function.
  std::uint64_t noise_seed = 0;
};

/// Each distortion is included independently with probability 1/2; when the
/// coin flips leave none, one is forced uniformly at random.
DistortionParams sample_distortion(const DistortionRanges& ranges, std::mt19937_64& rng);
bool within(const DistortionRanges& ranges, const DistortionParams& p);

/// Scale, rotation and blur in that order, then additive Gaussian noise;
/// the result is clamped to [0,1].
GrayImage apply_distortion(const GrayImage& x, const DistortionParams& p);

GrayImage degrade_image(const GrayImage& x, const DistortionRanges& ranges, std::uint64_t seed);

/// Normalized line kernel of `length` pixels along `theta_deg`, odd square support.
SignedImage motion_kernel(int length, double theta_deg);
GrayImage motion_blur(const GrayImage& img, int length, double theta_deg);

/// Magnifies about the image center and crops back to the original size.
GrayImage scale_about_center(const GrayImage& img, double factor);
GrayImage rotate_about_center(const GrayImage& img, double degrees);

/// y - x, unclamped.
SignedImage residual(const GrayImage& y, const GrayImage& x);
/// y - r clamped to [0,1].
GrayImage reconstruct(const GrayImage& y, const SignedImage& r);

inline constexpr int kPatchSize = 50;

struct PatchPair {
  GrayImage degraded;
  SignedImage residual;
  int row = 0;
  int col = 0;
};

std::vector<PatchPair> extract_patch_pairs(const GrayImage& x, const GrayImage& y, int count,
                                           std::uint64_t seed, int patch_size = kPatchSize);

/// Half mean squared error over a batch: (1/2N) sum_i ||r_i - t_i||^2.
double half_mse(const SignedImage& r, const SignedImage& t);
double half_mse(const std::vector<SignedImage>& r, const std::vector<SignedImage>& t);

}  // namespace sipseg
