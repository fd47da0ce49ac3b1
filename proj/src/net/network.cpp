#include "sipseg/net/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sipseg/net/layers.hpp"

namespace sipseg::net {
namespace {

constexpr std::size_t kBlockConvs[5] = {2, 2, 3, 3, 3};
constexpr std::size_t kBlockWidths[5] = {64, 128, 256, 512, 512};

void add_conv(NetworkSpec& net, const std::string& name, std::size_t in, std::size_t out) {
  net.layers.push_back({LayerKind::Conv3x3, name, in, out, {}, 1e-5});
  net.layers.push_back({LayerKind::BatchNorm, name + ".bn", out, out, {}, 1e-5});
  net.layers.push_back({LayerKind::Relu, name + ".relu", out, out, {}, 1e-5});
}

const Tensor& find(const Weights& w, const std::string& name) {
  auto it = w.find(name);
  if (it == w.end()) fail(ErrorCode::ShapeMismatch, "missing tensor '" + name + "'");
  return it->second;
}

}  // namespace

std::size_t NetworkSpec::count(LayerKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(layers.begin(), layers.end(), [kind](const LayerSpec& l) { return l.kind == kind; }));
}

NetworkSpec build_sipsegnet(const SegNetOptions& opts) {
  if (opts.width_divisor < 1 || opts.num_classes < 1) {
    fail(ErrorCode::InvalidArgument, "width divisor and class count must be positive");
  }
  if (opts.input_size < 32 || opts.input_size % 32) {
    fail(ErrorCode::InvalidArgument, "input size must be a positive multiple of 32");
  }
  std::size_t width[5];
  for (int b = 0; b < 5; ++b) width[b] = std::max<std::size_t>(1, kBlockWidths[b] / opts.width_divisor);

  NetworkSpec net;
  net.input_channels = 3;
  net.input_height = net.input_width = opts.input_size;
  net.num_classes = opts.num_classes;

  std::size_t ch = net.input_channels;
  for (int b = 0; b < 5; ++b) {
    const std::string block = "e" + std::to_string(b + 1);
    for (std::size_t k = 0; k < kBlockConvs[b]; ++k) {
      add_conv(net, block + ".c" + std::to_string(k + 1), ch, width[b]);
      ch = width[b];
    }
    net.layers.push_back({LayerKind::MaxPool2, block + ".pool", ch, ch, {}, 1e-5});
  }
  for (int b = 4; b >= 0; --b) {
    const std::string block = "d" + std::to_string(b + 1);
    net.layers.push_back({LayerKind::MaxUnpool2, block + ".unpool", ch, ch, "e" + std::to_string(b + 1) + ".pool", 1e-5});
    const std::size_t next = b > 0 ? width[b - 1] : opts.num_classes;
    for (std::size_t k = 0; k < kBlockConvs[b]; ++k) {
      const std::size_t out = k + 1 == kBlockConvs[b] ? next : width[b];
      add_conv(net, block + ".c" + std::to_string(k + 1), ch, out);
      ch = out;
    }
  }
  net.layers.push_back({LayerKind::Softmax, "softmax", ch, ch, {}, 1e-5});
  return net;
}

std::vector<std::pair<std::string, Shape>> parameter_shapes(const NetworkSpec& net) {
  std::vector<std::pair<std::string, Shape>> out;
  for (const LayerSpec& l : net.layers) {
    if (l.kind == LayerKind::Conv3x3) {
      out.emplace_back(l.name + ".weight", Shape{l.out_channels, l.in_channels, 3, 3});
    } else if (l.kind == LayerKind::BatchNorm) {
      for (const char* p : {".gamma", ".beta", ".mean", ".var"}) out.emplace_back(l.name + p, Shape{l.out_channels});
    }
  }
  return out;
}

Weights random_weights(const NetworkSpec& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Weights w;
  for (const auto& [name, shape] : parameter_shapes(net)) {
    Tensor t(shape, 0.0);
    if (shape.size() == 4) {
      std::normal_distribution<double> nd(0.0, std::sqrt(2.0 / static_cast<double>(shape[1] * 9)));
      // Rounded to float so the on-disk format holds them exactly.
      for (double& v : t.data()) v = static_cast<float>(nd(rng));
    } else if (name.ends_with(".gamma") || name.ends_with(".var")) {
      std::fill(t.data().begin(), t.data().end(), 1.0);
    }
    w.emplace(name, std::move(t));
  }
  return w;
}

Weights zero_weights(const NetworkSpec& net) {
  Weights w;
  for (const auto& [name, shape] : parameter_shapes(net)) {
    Tensor t(shape, 0.0);
    if (name.ends_with(".gamma") || name.ends_with(".var")) std::fill(t.data().begin(), t.data().end(), 1.0);
    w.emplace(name, std::move(t));
  }
  return w;
}

void check_weights(const NetworkSpec& net, const Weights& weights) {
  for (const auto& [name, shape] : parameter_shapes(net)) {
    const Tensor& t = find(weights, name);
    if (t.shape() != shape) {
      fail(ErrorCode::ShapeMismatch,
           "tensor '" + name + "' has shape " + to_string(t.shape()) + ", expected " + to_string(shape));
    }
  }
}

ForwardResult forward(const NetworkSpec& net, const Weights& weights, const Tensor& input) {
  check_weights(net, weights);
  if (input.rank() != 4 || input.dim(1) != net.input_channels || input.dim(2) != net.input_height ||
      input.dim(3) != net.input_width) {
    fail(ErrorCode::ShapeMismatch, "network input must be (B," + std::to_string(net.input_channels) + "," +
                                       std::to_string(net.input_height) + "," + std::to_string(net.input_width) +
                                       "), got " + to_string(input.shape()));
  }
  ForwardResult r;
  r.shapes.push_back({"input", LayerKind::Relu, input.shape()});
  std::map<std::string, PoolIndices> pools;
  Tensor x = input;
  for (const LayerSpec& l : net.layers) {
    switch (l.kind) {
      case LayerKind::Conv3x3:
        x = conv3x3(x, find(weights, l.name + ".weight"));
        break;
      case LayerKind::BatchNorm:
        batchnorm_inplace(x, {&find(weights, l.name + ".gamma"), &find(weights, l.name + ".beta"),
                              &find(weights, l.name + ".mean"), &find(weights, l.name + ".var"), l.eps});
        break;
      case LayerKind::Relu:
        relu_inplace(x);
        break;
      case LayerKind::MaxPool2: {
        PoolResult p = maxpool2_with_indices(x);
        x = std::move(p.pooled);
        pools[l.name] = std::move(p.indices);
        break;
      }
      case LayerKind::MaxUnpool2: {
        auto it = pools.find(l.paired_pool);
        if (it == pools.end()) fail(ErrorCode::InvalidArgument, "unpool '" + l.name + "' has no paired pool");
        x = max_unpool2(x, it->second, it->second.input_shape);
        break;
      }
      case LayerKind::Softmax:
        x = softmax_channels(x);
        break;
    }
    r.shapes.push_back({l.name, l.kind, x.shape()});
  }
  r.probabilities = std::move(x);
  return r;
}

Tensor image_to_input(const GrayImage& img, const NetworkSpec& net) {
  const std::size_t H = net.input_height, W = net.input_width;
  Tensor t({1, net.input_channels, H, W});
  const double sx = static_cast<double>(img.width()) / static_cast<double>(W);
  const double sy = static_cast<double>(img.height()) / static_cast<double>(H);
  for (std::size_t i = 0; i < H; ++i) {
    const double fy = std::clamp((i + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const double ay = fy - y0;
    for (std::size_t j = 0; j < W; ++j) {
      const double fx = std::clamp((j + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const double ax = fx - x0;
      const double top = img(x0, y0) + ax * (img.clamped(x0 + 1, y0) - img(x0, y0));
      const double bot = img.clamped(x0, y0 + 1) + ax * (img.clamped(x0 + 1, y0 + 1) - img.clamped(x0, y0 + 1));
      const double v = top + ay * (bot - top);
      for (std::size_t c = 0; c < net.input_channels; ++c) t.at(0, c, i, j) = v;
    }
  }
  return t;
}

LabelMap argmax_labels(const Tensor& prob, int width, int height) {
  if (prob.rank() != 4 || prob.dim(0) != 1) fail(ErrorCode::ShapeMismatch, "argmax expects a (1,K,H,W) tensor");
  const std::size_t K = prob.dim(1), H = prob.dim(2), W = prob.dim(3);
  if (K > 256) fail(ErrorCode::InvalidArgument, "too many classes for a label map");
  LabelMap out(width, height);
  for (int y = 0; y < height; ++y) {
    const std::size_t i = std::min(H - 1, static_cast<std::size_t>((y + 0.5) * H / height));
    for (int x = 0; x < width; ++x) {
      const std::size_t j = std::min(W - 1, static_cast<std::size_t>((x + 0.5) * W / width));
      std::size_t best = 0;
      for (std::size_t c = 1; c < K; ++c) {
        if (prob.at(0, c, i, j) > prob.at(0, best, i, j)) best = c;
      }
      out(x, y) = static_cast<std::uint8_t>(best);
    }
  }
  return out;
}

}  // namespace sipseg::net
