#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sipseg/metrics/confusion.hpp"

namespace sipseg::metrics {

struct ClassReport {
  double accuracy = 0;     // A
  double precision = 0;    // P
  double recall = 0;       // R
  double specificity = 0;  // S
  double npv = 0;
  double iou = 0;
  double dice = 0;
  double f1 = 0;
  double fpr = 0;
  double fnr = 0;
  double nice2 = 0;  // N2
};

/// Counters for zero-denominator ratios resolved by convention.
struct DegenerateEvents {
  std::uint64_t zero_denominator = 0;
  std::uint64_t skipped_recall_terms = 0;
  std::uint64_t skipped_iou_terms = 0;

  DegenerateEvents& operator+=(const DegenerateEvents& o) {
    zero_denominator += o.zero_denominator;
    skipped_recall_terms += o.skipped_recall_terms;
    skipped_iou_terms += o.skipped_iou_terms;
    return *this;
  }
};

/// Ratio of a "higher is better" quantity. A zero denominator yields 1 when
/// the class made no errors and 0 otherwise.
double score_ratio(std::uint64_t num, std::uint64_t den, bool error_free, DegenerateEvents* ev);
/// Ratio of an error rate; a zero denominator yields 0 when error-free, else 1.
double error_ratio(std::uint64_t num, std::uint64_t den, bool error_free, DegenerateEvents* ev);

ClassReport class_report(const BinaryCounts& b, DegenerateEvents* ev = nullptr);
std::vector<ClassReport> class_metrics(const ConfusionMatrix& cm, DegenerateEvents* ev = nullptr);

/// Per-image terms that feed the dataset means.
struct ImageScores {
  double mean_accuracy = 0;  // I, mean recall over present classes
  double global_accuracy = 0;
  double miou = 0;
  double fwiou = 0;
  double dice = 0;
  double nice1 = 0;
  double nice2 = 0;
};

ImageScores image_scores(const ConfusionMatrix& cm, DegenerateEvents* ev = nullptr);

struct AggregateReport {
  double ma = 0;
  double ga = 0;
  double miou = 0;
  double fwiou = 0;
  double dice = 0;
  double nice1 = 0;
  double nice2 = 0;
  /// Per-class values averaged over images.
  std::vector<ClassReport> per_class;
  std::uint64_t images = 0;
  std::uint64_t pixels = 0;
  DegenerateEvents events;
};

/// Throws InvalidArgument on an empty list.
AggregateReport aggregate_metrics(std::span<const ConfusionMatrix> per_image);

}  // namespace sipseg::metrics
