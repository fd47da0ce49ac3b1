#include "sipseg/net/layers.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "sipseg/error.hpp"

namespace sipseg::net {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Rough cap on the im2col scratch, in doubles.
constexpr std::size_t kColumnBudget = std::size_t{1} << 22;

void require_rank4(const Tensor& x, const char* what) {
  if (x.rank() != 4) fail(ErrorCode::ShapeMismatch, std::string(what) + " expects an NCHW tensor, got " + to_string(x.shape()));
}

}  // namespace

Tensor conv3x3(const Tensor& x, const Tensor& weight) {
  require_rank4(x, "conv3x3");
  if (weight.rank() != 4 || weight.dim(2) != 3 || weight.dim(3) != 3 || weight.dim(1) != x.dim(1)) {
    fail(ErrorCode::ShapeMismatch, "conv3x3 weight " + to_string(weight.shape()) + " does not fit input " +
                                       to_string(x.shape()));
  }
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3), O = weight.dim(0);
  const std::size_t K = C * 9;
  Tensor y({N, O, H, W});
  Eigen::Map<const RowMat> wm(weight.data().data(), static_cast<Eigen::Index>(O), static_cast<Eigen::Index>(K));
  const std::size_t tile = std::clamp<std::size_t>(kColumnBudget / std::max<std::size_t>(1, K * W), 1, H);
  RowMat cols;

  for (std::size_t n = 0; n < N; ++n) {
    const double* xin = x.data().data() + n * C * H * W;
    double* yout = y.data().data() + n * O * H * W;
    for (std::size_t r0 = 0; r0 < H; r0 += tile) {
      const std::size_t rows = std::min(tile, H - r0);
      const std::size_t P = rows * W;
      cols.resize(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(P));
#pragma omp parallel for schedule(static)
      for (std::size_t k = 0; k < K; ++k) {
        const std::size_t c = k / 9;
        const long di = static_cast<long>(k % 9 / 3) - 1;
        const long dj = static_cast<long>(k % 3) - 1;
        double* dst = cols.data() + k * P;
        const double* plane = xin + c * H * W;
        for (std::size_t i = 0; i < rows; ++i) {
          const long ii = static_cast<long>(r0 + i) + di;
          double* row = dst + i * W;
          if (ii < 0 || ii >= static_cast<long>(H)) {
            std::fill(row, row + W, 0.0);
            continue;
          }
          const double* src = plane + static_cast<std::size_t>(ii) * W;
          for (std::size_t j = 0; j < W; ++j) {
            const long jj = static_cast<long>(j) + dj;
            row[j] = (jj < 0 || jj >= static_cast<long>(W)) ? 0.0 : src[jj];
          }
        }
      }
      Eigen::Map<RowMat, 0, Eigen::OuterStride<>> out(yout + r0 * W, static_cast<Eigen::Index>(O),
                                                      static_cast<Eigen::Index>(P),
                                                      Eigen::OuterStride<>(static_cast<Eigen::Index>(H * W)));
      out.noalias() = wm * cols;
    }
  }
  return y;
}

void batchnorm_inplace(Tensor& x, const BatchNormParams& bn) {
  require_rank4(x, "batchnorm");
  const std::size_t C = x.dim(1);
  for (const Tensor* t : {bn.gamma, bn.beta, bn.mean, bn.variance}) {
    if (!t || t->size() != C) fail(ErrorCode::ShapeMismatch, "batch norm parameters must have one entry per channel");
  }
  const std::size_t N = x.dim(0), HW = x.dim(2) * x.dim(3);
#pragma omp parallel for collapse(2) schedule(static)
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      const double scale = (*bn.gamma)[c] / std::sqrt((*bn.variance)[c] + bn.eps);
      const double shift = (*bn.beta)[c] - scale * (*bn.mean)[c];
      double* p = x.data().data() + (n * C + c) * HW;
      if (scale == 1.0 && shift == 0.0) continue;
      for (std::size_t i = 0; i < HW; ++i) p[i] = p[i] * scale + shift;
    }
  }
}

void relu_inplace(Tensor& x) {
  for (double& v : x.data()) v = v > 0.0 ? v : 0.0;
}

PoolResult maxpool2_with_indices(const Tensor& x) {
  require_rank4(x, "maxpool2");
  const std::size_t N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  if (H % 2 || W % 2) fail(ErrorCode::ShapeMismatch, "maxpool2 needs even spatial dims, got " + to_string(x.shape()));
  const std::size_t h = H / 2, w = W / 2;
  PoolResult r{Tensor({N, C, h, w}), PoolIndices{{N, C, h, w}, x.shape(), {}}};
  r.indices.local.resize(N * C * h * w);
#pragma omp parallel for collapse(2) schedule(static)
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
          std::uint8_t best = 0;
          double v = x.at(n, c, 2 * i, 2 * j);
          for (std::uint8_t k = 1; k < 4; ++k) {
            const double u = x.at(n, c, 2 * i + k / 2, 2 * j + k % 2);
            if (u > v) {
              v = u;
              best = k;
            }
          }
          const std::size_t o = ((n * C + c) * h + i) * w + j;
          r.pooled[o] = v;
          r.indices.local[o] = best;
        }
      }
    }
  }
  return r;
}

Tensor max_unpool2(const Tensor& x, const PoolIndices& idx, const Shape& out_shape) {
  require_rank4(x, "max_unpool2");
  if (idx.pooled_shape != x.shape() || idx.local.size() != x.size()) {
    fail(ErrorCode::ShapeMismatch, "pool indices " + to_string(idx.pooled_shape) + " do not match input " +
                                       to_string(x.shape()));
  }
  if (out_shape.size() != 4 || out_shape[0] != x.dim(0) || out_shape[1] != x.dim(1) ||
      out_shape[2] != 2 * x.dim(2) || out_shape[3] != 2 * x.dim(3)) {
    fail(ErrorCode::ShapeMismatch, "unpool output " + to_string(out_shape) + " is not twice " + to_string(x.shape()));
  }
  const std::size_t N = x.dim(0), C = x.dim(1), h = x.dim(2), w = x.dim(3);
  Tensor y(out_shape, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
          const std::size_t o = ((n * C + c) * h + i) * w + j;
          const std::uint8_t k = idx.local[o];
          if (k > 3) fail(ErrorCode::IndexOutOfWindow, "pool index " + std::to_string(k) + " outside its 2x2 window");
          y.at(n, c, 2 * i + k / 2, 2 * j + k % 2) = x[o];
        }
      }
    }
  }
  return y;
}

Tensor softmax_channels(const Tensor& logits) {
  require_rank4(logits, "softmax");
  const std::size_t N = logits.dim(0), C = logits.dim(1), HW = logits.dim(2) * logits.dim(3);
  Tensor p(logits.shape());
#pragma omp parallel for schedule(static)
  for (std::size_t n = 0; n < N; ++n) {
    const double* in = logits.data().data() + n * C * HW;
    double* out = p.data().data() + n * C * HW;
    for (std::size_t i = 0; i < HW; ++i) {
      double m = in[i];
      for (std::size_t c = 1; c < C; ++c) m = std::max(m, in[c * HW + i]);
      double s = 0;
      for (std::size_t c = 0; c < C; ++c) {
        out[c * HW + i] = std::exp(in[c * HW + i] - m);
        s += out[c * HW + i];
      }
      for (std::size_t c = 0; c < C; ++c) out[c * HW + i] /= s;
    }
  }
  return p;
}

}  // namespace sipseg::net
