#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sipseg/image.hpp"

namespace sipseg::metrics {

/// entry(g, p) counts pixels of ground-truth class g predicted as p.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes = kNumClasses)
      : k_(num_classes), counts_(num_classes * num_classes, 0) {}

  std::size_t num_classes() const noexcept { return k_; }
  std::uint64_t operator()(std::size_t g, std::size_t p) const { return counts_[g * k_ + p]; }
  std::uint64_t& operator()(std::size_t g, std::size_t p) { return counts_[g * k_ + p]; }

  std::uint64_t total() const;
  std::uint64_t row_sum(std::size_t g) const;
  std::uint64_t col_sum(std::size_t p) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion_matrix(const LabelMap& gt, const LabelMap& pred,
                                 std::size_t num_classes = kNumClasses);

/// One-vs-rest reduction for class c: tp = N_xx, tn = N_yy, fp = N_xy, fn = N_yx.
struct BinaryCounts {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

BinaryCounts one_vs_rest(const ConfusionMatrix& cm, std::size_t c);

}  // namespace sipseg::metrics
