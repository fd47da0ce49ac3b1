#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "sipseg/image.hpp"

namespace testing {

inline sipseg::GrayImage random_gray(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  sipseg::GrayImage img(w, h);
  for (double& v : img.pixels()) v = u(rng);
  return img;
}

/// Uniform doubles on the 2^-53 grid, the usual construction of a random double in [0,1).
inline sipseg::GrayImage random_dyadic(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  sipseg::GrayImage img(w, h);
  for (double& v : img.pixels()) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return img;
}

inline sipseg::LabelMap random_labels(int w, int h, std::uint64_t seed, int classes = sipseg::kNumClasses) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, classes - 1);
  sipseg::LabelMap m(w, h);
  for (auto& v : m.pixels()) v = static_cast<std::uint8_t>(u(rng));
  return m;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("sipseg_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
