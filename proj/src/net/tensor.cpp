#include "sipseg/net/tensor.hpp"

#include <cmath>

#include "sipseg/error.hpp"

namespace sipseg::net {

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

std::string to_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  data_.assign(element_count(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != element_count(shape_)) {
    fail(ErrorCode::ShapeMismatch, "tensor data length " + std::to_string(data_.size()) +
                                       " does not match shape " + to_string(shape_));
  }
}

}  // namespace sipseg::net
