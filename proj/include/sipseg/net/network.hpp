#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sipseg/image.hpp"
#include "sipseg/net/tensor.hpp"

namespace sipseg::net {

enum class LayerKind { Conv3x3, BatchNorm, Relu, MaxPool2, MaxUnpool2, Softmax };

struct LayerSpec {
  LayerKind kind = LayerKind::Relu;
  std::string name;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  /// Pool layer name an unpool reads its indices from.
  std::string paired_pool;
  double eps = 1e-5;
};

struct NetworkSpec {
  std::size_t input_channels = 3;
  std::size_t input_height = 224;
  std::size_t input_width = 224;
  std::size_t num_classes = kNumClasses;
  std::vector<LayerSpec> layers;

  std::size_t count(LayerKind kind) const;
};

struct SegNetOptions {
  std::size_t input_size = 224;
  /// Divides every block width; 1 gives the full 64-128-256-512-512 network.
  std::size_t width_divisor = 1;
  std::size_t num_classes = kNumClasses;
};

/// Encoder blocks of 2,2,3,3,3 convolutions each followed by a pooling layer,
/// then a mirrored decoder whose blocks start with an unpool wired to the
/// matching encoder pool. Every conv is followed by batch norm and ReLU.
NetworkSpec build_sipsegnet(const SegNetOptions& opts = {});

using Weights = std::map<std::string, Tensor>;

/// Names and shapes of every tensor the network consumes, in layer order.
std::vector<std::pair<std::string, Shape>> parameter_shapes(const NetworkSpec& net);

/// He-scaled normal conv weights; identity batch norm statistics.
Weights random_weights(const NetworkSpec& net, std::uint64_t seed);
Weights zero_weights(const NetworkSpec& net);

/// Throws ShapeMismatch naming the first missing or mis-shaped tensor.
void check_weights(const NetworkSpec& net, const Weights& weights);

struct LayerShape {
  std::string name;
  LayerKind kind;
  Shape shape;
};

struct ForwardResult {
  Tensor probabilities;
  std::vector<LayerShape> shapes;
};

ForwardResult forward(const NetworkSpec& net, const Weights& weights, const Tensor& input);

/// Bilinear resize to the input layer size, replicated over the input channels.
Tensor image_to_input(const GrayImage& img, const NetworkSpec& net);
/// Per-pixel argmax of a (1,K,H,W) probability tensor, resized (nearest) to width x height.
LabelMap argmax_labels(const Tensor& prob, int width, int height);

}  // namespace sipseg::net
