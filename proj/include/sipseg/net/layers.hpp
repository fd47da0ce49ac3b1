#pragma once

#include <cstdint>
#include <vector>

#include "sipseg/net/tensor.hpp"

namespace sipseg::net {

/// 3x3 convolution, stride 1, zero padding 1, no bias.
/// `weight` is (out, in, 3, 3); `x` is (N, in, H, W).
Tensor conv3x3(const Tensor& x, const Tensor& weight);

struct BatchNormParams {
  const Tensor* gamma = nullptr;
  const Tensor* beta = nullptr;
  const Tensor* mean = nullptr;
  const Tensor* variance = nullptr;
  double eps = 1e-5;
};

/// Inference-mode batch norm with supplied running statistics.
void batchnorm_inplace(Tensor& x, const BatchNormParams& bn);
void relu_inplace(Tensor& x);

/// Argmax position of every pooled cell, as 0..3 within its 2x2 window
/// (row-major: 0 top-left, 3 bottom-right).
struct PoolIndices {
  Shape pooled_shape;
  Shape input_shape;
  std::vector<std::uint8_t> local;
};

struct PoolResult {
  Tensor pooled;
  PoolIndices indices;
};

/// 2x2 stride-2 max pool. Ties resolve to the first cell in window order.
PoolResult maxpool2_with_indices(const Tensor& x);

/// Scatters each value to the position recorded in `idx`; every other cell is 0.
Tensor max_unpool2(const Tensor& x, const PoolIndices& idx, const Shape& out_shape);

/// Softmax over the channel axis of an NCHW tensor.
Tensor softmax_channels(const Tensor& logits);

}  // namespace sipseg::net
