#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sipseg/image.hpp"
#include "sipseg/net/tensor.hpp"

namespace sipseg::net {

/// Inverse-frequency class weights, kept as exact pixel counts.
struct ClassWeights {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  std::size_t num_classes() const { return counts.size(); }
  double frequency(std::size_t c) const {
    return static_cast<double>(counts[c]) / static_cast<double>(total);
  }
  double weight(std::size_t c) const {
    return static_cast<double>(total) / static_cast<double>(counts[c]);
  }
};

/// Throws AbsentClass when any class has no pixels.
ClassWeights class_weights(std::span<const LabelMap> label_maps,
                           std::size_t num_classes = kNumClasses);

/// (N,K,H,W) one-hot encoding of a batch of label maps.
Tensor one_hot(std::span<const LabelMap> labels, std::size_t num_classes = kNumClasses);

inline constexpr double kBceEps = 1e-7;

/// Mean binary cross entropy summed over the channel axis, every pixel
/// weighted by the weight of its true class.
double weighted_bce_loss(const Tensor& prob, const Tensor& target, std::span<const double> weights,
                         double eps = kBceEps);

struct SgdmState {
  std::vector<double> velocity;
};

/// u = -lr * grad + momentum * previous_update; w += u.
void sgdm_step(std::span<double> w, std::span<const double> grad, SgdmState& state,
               double learning_rate, double momentum);

}  // namespace sipseg::net
