#include "sipseg/net/training.hpp"

#include <algorithm>
#include <cmath>

namespace sipseg::net {

ClassWeights class_weights(std::span<const LabelMap> label_maps, std::size_t num_classes) {
  ClassWeights cw;
  cw.counts.assign(num_classes, 0);
  for (const LabelMap& m : label_maps) {
    for (std::uint8_t v : m.pixels()) {
      if (v >= num_classes) fail(ErrorCode::ValueOutOfRange, "label " + std::to_string(v) + " outside the class set");
      ++cw.counts[v];
    }
    cw.total += m.size();
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (cw.counts[c] == 0) fail(ErrorCode::AbsentClass, "class " + std::to_string(c) + " has no pixels");
  }
  return cw;
}

Tensor one_hot(std::span<const LabelMap> labels, std::size_t num_classes) {
  if (labels.empty()) fail(ErrorCode::InvalidArgument, "one_hot needs at least one label map");
  const std::size_t H = labels[0].height(), W = labels[0].width();
  Tensor t({labels.size(), num_classes, H, W});
  for (std::size_t n = 0; n < labels.size(); ++n) {
    require_same_shape(labels[0], labels[n], "one_hot");
    for (std::size_t i = 0; i < H; ++i) {
      for (std::size_t j = 0; j < W; ++j) {
        const std::uint8_t v = labels[n](static_cast<int>(j), static_cast<int>(i));
        if (v >= num_classes) fail(ErrorCode::ValueOutOfRange, "label outside the class set");
        t.at(n, v, i, j) = 1.0;
      }
    }
  }
  return t;
}

double weighted_bce_loss(const Tensor& prob, const Tensor& target, std::span<const double> weights, double eps) {
  if (prob.shape() != target.shape() || prob.rank() != 4) {
    fail(ErrorCode::ShapeMismatch, "loss inputs " + to_string(prob.shape()) + " and " + to_string(target.shape()) +
                                       " must be matching NCHW tensors");
  }
  const std::size_t N = prob.dim(0), K = prob.dim(1), HW = prob.dim(2) * prob.dim(3);
  if (weights.size() != K) fail(ErrorCode::ShapeMismatch, "need one class weight per channel");
  double total = 0;
  for (std::size_t n = 0; n < N; ++n) {
    const double* p = prob.data().data() + n * K * HW;
    const double* t = target.data().data() + n * K * HW;
    for (std::size_t i = 0; i < HW; ++i) {
      // The true class is the hot channel of the target.
      std::size_t cls = 0;
      for (std::size_t c = 1; c < K; ++c) {
        if (t[c * HW + i] > t[cls * HW + i]) cls = c;
      }
      double s = 0;
      for (std::size_t c = 0; c < K; ++c) {
        const double pc = std::clamp(p[c * HW + i], eps, 1.0 - eps);
        const double tc = t[c * HW + i];
        s += tc * std::log(pc) + (1.0 - tc) * std::log(1.0 - pc);
      }
      total += weights[cls] * s;
    }
  }
  return -total / static_cast<double>(N * HW);
}

void sgdm_step(std::span<double> w, std::span<const double> grad, SgdmState& state, double learning_rate,
               double momentum) {
  if (grad.size() != w.size()) fail(ErrorCode::ShapeMismatch, "gradient length does not match the parameters");
  if (!(learning_rate > 0) || !(momentum >= 0 && momentum < 1)) {
    fail(ErrorCode::InvalidArgument, "need learning rate > 0 and momentum in [0,1)");
  }
  if (state.velocity.empty()) state.velocity.assign(w.size(), 0.0);
  if (state.velocity.size() != w.size()) fail(ErrorCode::ShapeMismatch, "momentum state length does not match");
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double u = -learning_rate * grad[i] + momentum * state.velocity[i];
    w[i] += u;
    state.velocity[i] = u;
  }
}

}  // namespace sipseg::net
