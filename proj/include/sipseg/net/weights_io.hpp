#pragma once

#include <filesystem>

#include "sipseg/net/network.hpp"

namespace sipseg::net {

inline constexpr char kWeightsMagic[4] = {'S', 'I', 'P', 'W'};
inline constexpr std::uint16_t kWeightsVersion = 1;

/// Little-endian: magic, u16 version, u32 count; per tensor u16 name length,
/// UTF-8 name, u8 rank, u32 dims, f32 payload.
void save_tensors(const Weights& tensors, const std::filesystem::path& path);
Weights load_tensors(const std::filesystem::path& path);

void save_weights(const NetworkSpec& net, const Weights& weights,
                  const std::filesystem::path& path);
/// Loads and validates every tensor against the network.
Weights load_weights(const NetworkSpec& net, const std::filesystem::path& path);

}  // namespace sipseg::net
