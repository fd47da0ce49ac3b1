#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sipseg/error.hpp"

namespace sipseg {

inline constexpr int kNumClasses = 4;

enum class EyeClass : std::uint8_t { Periocular = 0, Sclera = 1, Iris = 2, Pupil = 3 };

/// Row-major 2-D plane. The tag keeps gray, signed, mask and label planes
/// from being mixed up even though some share an element type.
template <typename T, typename Tag>
class Plane {
 public:
  using value_type = T;

  Plane() = default;
  Plane(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      fail(ErrorCode::InvalidArgument,
           "plane dimensions must be positive, got " + std::to_string(width) + "x" +
               std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }
  Plane(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1 ||
        data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      fail(ErrorCode::InvalidArgument, "plane data does not match its dimensions");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }

  /// Edge-replicated read; coordinates outside the plane clamp to the border.
  const T& clamped(int x, int y) const {
    return data_[index(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1))];
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }
  std::span<T> row(int y) { return std::span<T>(data_).subspan(index(0, y), width_); }
  std::span<const T> row(int y) const {
    return std::span<const T>(data_).subspan(index(0, y), width_);
  }

  bool same_shape(int w, int h) const noexcept { return w == width_ && h == height_; }
  template <typename U, typename OtherTag>
  bool same_shape(const Plane<U, OtherTag>& other) const noexcept {
    return other.width() == width_ && other.height() == height_;
  }

  friend bool operator==(const Plane& a, const Plane& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
  }

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct GrayTag {};
struct SignedTag {};
struct MaskTag {};
struct LabelTag {};

/// Intensities in [0,1].
using GrayImage = Plane<double, GrayTag>;
/// Unclamped differences of gray images, nominally in [-1,1].
using SignedImage = Plane<double, SignedTag>;
/// Values in {0,1}.
using BinaryMask = Plane<std::uint8_t, MaskTag>;
/// Class ids in {0..kNumClasses-1}.
using LabelMap = Plane<std::uint8_t, LabelTag>;

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::ShapeMismatch,
         std::string(what) + ": shape mismatch " + std::to_string(a.width()) + "x" +
             std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
             std::to_string(b.height()));
  }
}

/// True when every value is finite and inside [0,1].
bool is_valid(const GrayImage& img);
bool is_valid(const BinaryMask& mask);
bool is_valid(const LabelMap& labels);

GrayImage clamp01(SignedImage img);
GrayImage mask_to_gray(const BinaryMask& mask);
GrayImage invert(const GrayImage& img);

}  // namespace sipseg
