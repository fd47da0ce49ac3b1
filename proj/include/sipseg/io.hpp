#pragma once

#include <cstdint>
#include <filesystem>

#include "sipseg/image.hpp"

namespace sipseg {

/// Reads an 8-bit grayscale PGM (P5, maxval 255) or grayscale PNG.
/// A byte value p becomes p/255.
GrayImage read_gray(const std::filesystem::path& path);

/// Writes an 8-bit P5 PGM, quantizing each value as round(v*255) clamped to [0,255].
void write_gray(const GrayImage& img, const std::filesystem::path& path);

/// round(v*255) clamped to [0,255], the quantization used by write_gray.
std::uint8_t quantize(double v);

LabelMap read_labels(const std::filesystem::path& path);
void write_labels(const LabelMap& labels, const std::filesystem::path& path);

void write_mask(const BinaryMask& mask, const std::filesystem::path& path);

}  // namespace sipseg
