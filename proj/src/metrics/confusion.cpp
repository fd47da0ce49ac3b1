#include "sipseg/metrics/confusion.hpp"

#include <numeric>

namespace sipseg::metrics {

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t g) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < k_; ++p) s += (*this)(g, p);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t p) const {
  std::uint64_t s = 0;
  for (std::size_t g = 0; g < k_; ++g) s += (*this)(g, p);
  return s;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.k_ != k_) fail(ErrorCode::ShapeMismatch, "confusion matrices have different class counts");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix confusion_matrix(const LabelMap& gt, const LabelMap& pred, std::size_t num_classes) {
  require_same_shape(gt, pred, "confusion_matrix");
  ConfusionMatrix cm(num_classes);
  auto g = gt.pixels();
  auto p = pred.pixels();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] >= num_classes || p[i] >= num_classes) {
      fail(ErrorCode::ValueOutOfRange, "label outside the class set at pixel " + std::to_string(i));
    }
    ++cm(g[i], p[i]);
  }
  return cm;
}

BinaryCounts one_vs_rest(const ConfusionMatrix& cm, std::size_t c) {
  BinaryCounts b;
  b.tp = cm(c, c);
  b.fp = cm.col_sum(c) - b.tp;
  b.fn = cm.row_sum(c) - b.tp;
  b.tn = cm.total() - b.tp - b.fp - b.fn;
  return b;
}

}  // namespace sipseg::metrics
