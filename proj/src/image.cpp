#include "sipseg/image.hpp"

#include <cmath>

namespace sipseg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "file not found";
    case ErrorCode::MalformedHeader: return "malformed header";
    case ErrorCode::NotGrayscale: return "not grayscale";
    case ErrorCode::Unwritable: return "unwritable path";
    case ErrorCode::ValueOutOfRange: return "value out of range";
    case ErrorCode::ShapeMismatch: return "shape mismatch";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::GeometryOutOfBounds: return "geometry out of bounds";
    case ErrorCode::DegenerateInput: return "degenerate input";
    case ErrorCode::NoContour: return "no contour";
    case ErrorCode::AbsentClass: return "absent class";
    case ErrorCode::MagicMismatch: return "magic mismatch";
    case ErrorCode::TruncatedFile: return "truncated file";
    case ErrorCode::IndexOutOfWindow: return "index out of window";
    case ErrorCode::ConfigError: return "config error";
  }
  return "unknown";
}

bool is_valid(const GrayImage& img) {
  if (img.empty()) return false;
  for (double v : img.pixels()) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
  }
  return true;
}

bool is_valid(const BinaryMask& mask) {
  if (mask.empty()) return false;
  for (auto v : mask.pixels()) {
    if (v > 1) return false;
  }
  return true;
}

bool is_valid(const LabelMap& labels) {
  if (labels.empty()) return false;
  for (auto v : labels.pixels()) {
    if (v >= kNumClasses) return false;
  }
  return true;
}

GrayImage clamp01(SignedImage img) {
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::clamp(src[i], 0.0, 1.0);
  return out;
}

GrayImage mask_to_gray(const BinaryMask& mask) {
  GrayImage out(mask.width(), mask.height());
  auto src = mask.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 1.0 : 0.0;
  return out;
}

GrayImage invert(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = 1.0 - src[i];
  return out;
}

}  // namespace sipseg
