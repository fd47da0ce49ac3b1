#pragma once

// Straightforward serial versions of the parallel kernels. They trade speed
// for obviousness and exist so tests and benchmarks have something to hold the
// fast paths against.

#include "sipseg/net/tensor.hpp"
#include "sipseg/periocular.hpp"
#include "sipseg/restore.hpp"

namespace sipseg::reference {

GrayImage local_mean(const GrayImage& img, int window);
BinaryMask adaptive_threshold(const GrayImage& img, const AdaptiveThresholdConfig& cfg);
BinaryMask dilate_disk(const BinaryMask& mask, int radius);
/// Reconstruction by erosion iterated to a fixed point.
GrayImage fill_holes(const GrayImage& img);
GrayImage nlm_filter(const GrayImage& img, const NlmConfig& cfg);
GrayImage atmed_filter(const GrayImage& f, const AtmedConfig& cfg);
/// Stride-1 search over every admissible center.
PupilCircle dio_exhaustive(const GrayImage& img, const DioConfig& cfg);
net::Tensor conv3x3(const net::Tensor& x, const net::Tensor& weight);

}  // namespace sipseg::reference
