#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sipseg/image.hpp"
#include "sipseg/restore.hpp"

namespace sipseg {

struct PupilCircle {
  double x = 0;
  double y = 0;
  double radius = 0;
  /// Smoothed radial derivative of the circular mean at the chosen radius.
  double response = 0;
};

struct DioConfig {
  int r_min = 5;
  /// 0 selects floor(0.25 * min(W,H)).
  int r_max = 0;
  double sigma = 1.0;
  int samples = 360;
  int coarse_stride = 2;
  int refine_half = 2;
  /// Responses below this are reported as NoContour.
  double response_floor = 0.05;
  /// Only score edges where the circular mean rises outward (a dark disk on a
  /// brighter surround), so bright specular spots cannot pose as pupils.
  /// false scores |dM/dr| in either direction.
  bool dark_inside = true;
};

/// Mean over `samples` equiangular bilinear samples on the circle.
double circular_mean(const GrayImage& img, double cx, double cy, double r, int samples);

struct RadialResponse {
  double radius = 0;
  double response = 0;
  bool valid = false;
};

/// Best |G_sigma * dM/dr| over the radius sweep at a fixed center.
RadialResponse radial_response(const GrayImage& img, int cx, int cy, const DioConfig& cfg);

PupilCircle dio_locate_pupil(const GrayImage& img, const DioConfig& cfg = {});
PupilCircle dio_locate_pupil(const BinaryMask& mask, const DioConfig& cfg = {});

BinaryMask disk_mask(int width, int height, const PupilCircle& circle);

struct PeriocularConfig {
  AdaptiveThresholdConfig threshold{0.375, Polarity::Dark, 0, 0.6};
  DioConfig dio;
  /// Added to the located radius before the pupil is cut out, to absorb the
  /// half-pixel radius grid and the integer center.
  double pupil_margin = 1.0;
};

struct PeriocularResult {
  BinaryMask with_pupil;
  BinaryMask periocular;
  std::optional<PupilCircle> pupil;
  bool pupil_found = false;
  std::string warning;
};

PeriocularResult extract_periocular_mask(const GrayImage& e, const PeriocularConfig& cfg = {});

struct AtmedConfig {
  int window = 21;
  int padding() const { return (window - 1) / 2; }
};

/// Triangular membership peaked at the window median; 1 when the slope on
/// the value's side of the median has zero width.
double atmed_weight(double v, double lo, double med, double hi);

GrayImage atmed_filter(const GrayImage& f, const AtmedConfig& cfg = {});

/// fz where p is set, f elsewhere.
GrayImage suppress_periocular(const GrayImage& f, const GrayImage& fz, const BinaryMask& p);

}  // namespace sipseg
