#pragma once

#include <string>
#include <vector>

#include "sipseg/image.hpp"
#include "sipseg/net/tensor.hpp"

namespace sipseg::metrics {

inline constexpr double kThresholdStep = 0.003;

/// 0, step, 2 step, ... and finally 1 itself.
std::vector<double> threshold_grid(double step = kThresholdStep);

struct CurvePoint {
  double threshold = 0;
  double fpr = 0;
  double tpr = 0;
  double precision = 0;
  double recall = 0;
  bool precision_defined = false;
};

struct ClassCurve {
  std::vector<CurvePoint> points;
  double roc_auc = 0;
  double pr_auc = 0;
  /// False when the class has no positive (or no negative) pixels.
  bool defined = false;
};

/// Per-class sweep: a pixel is positive iff prob_c >= threshold.
/// `prob` is (K,H,W) or (1,K,H,W).
std::vector<ClassCurve> curves_and_auc(const LabelMap& gt, const net::Tensor& prob,
                                       double step = kThresholdStep);

/// Trapezoid area under (x, y) points after sorting by x then y.
double trapezoid_auc(std::vector<std::pair<double, double>> pts);

std::string curve_csv(const ClassCurve& curve);

}  // namespace sipseg::metrics
