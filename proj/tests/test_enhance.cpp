#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sipseg/enhance.hpp"
#include "sipseg/synth.hpp"

using namespace sipseg;

namespace {

GrayImage ramp(int w, int h) {
  GrayImage img(w, h);
  const double n = static_cast<double>(w) * h - 1;
  for (int i = 0; i < w * h; ++i) img.pixels()[static_cast<std::size_t>(i)] = i / n;
  return img;
}

GrayImage every_level(int copies) {
  GrayImage img(256, copies);
  for (int y = 0; y < copies; ++y) {
    for (int x = 0; x < 256; ++x) img(x, y) = x / 255.0;
  }
  return img;
}

}  // namespace

TEST_CASE("stretch limits") {
  const StretchLimits r = stretch_limits(ramp(101, 101));
  CHECK(r.low_in == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(r.high_in == doctest::Approx(0.99).epsilon(1e-9));
  CHECK(r.low_out == 0.0);
  CHECK(r.high_out == 1.0);

  const GrayImage img = testing::random_gray(33, 17, 2, 0.1, 0.7);
  double lo = 1, hi = 0;
  for (double v : img.pixels()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const StretchLimits m = stretch_limits(img, 0.0);
  CHECK(m.low_in == lo);
  CHECK(m.high_in == hi);

  try {
    stretch_limits(GrayImage(8, 8, 0.3));
    FAIL("constant image accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateInput);
  }
  CHECK_THROWS_AS(stretch_limits(img, 0.5), Error);
}

TEST_CASE("quantile interpolates between order statistics") {
  const std::vector<double> v = {4, 1, 3, 2};
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(quantile(v, 0.5) == 2.5);
  CHECK(quantile(v, 1.0 / 3.0) == doctest::Approx(2.0));
}

TEST_CASE("linear map") {
  const GrayImage img = testing::random_gray(20, 20, 4);
  CHECK(linear_map(img, StretchLimits{}) == img);
  const StretchLimits lim{0.2, 0.6, 0.0, 1.0};
  GrayImage probe(5, 1);
  probe(0, 0) = 0.2;
  probe(1, 0) = 0.1;
  probe(2, 0) = 0.4;
  probe(3, 0) = 0.6;
  probe(4, 0) = 0.95;
  const GrayImage out = linear_map(probe, lim);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(1, 0) == 0.0);
  CHECK(std::abs(out(2, 0) - 0.5) <= 1e-12);
  CHECK(out(3, 0) == 1.0);
  CHECK(out(4, 0) == 1.0);
  // Monotone at the mapping level.
  double prev = -1;
  for (int i = 0; i <= 1000; ++i) {
    GrayImage p(1, 1, i / 1000.0);
    const double v = linear_map(p, lim)(0, 0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("contrast stretch") {
  CHECK(contrast_stretch_value(0.4, 0.4, 3.0) == 0.5);
  CHECK(contrast_stretch_value(0.0, 0.4, 3.0) == 0.0);
  CHECK(contrast_stretch_value(1e-9, 0.4, 3.0) < 1e-20);
  CHECK(std::abs(contrast_stretch_value(0.8, 0.4, 3.0) - 8.0 / 9.0) <= 1e-15);

  // Two-valued image with mean 0.4.
  GrayImage img(2, 1);
  img(0, 0) = 0.0;
  img(1, 0) = 0.8;
  const GrayImage out = contrast_stretch(img, 3.0);
  CHECK(out(0, 0) == 0.0);
  CHECK(std::abs(out(1, 0) - 8.0 / 9.0) <= 1e-15);

  // The midpoint property on an arbitrary image: a pixel equal to the mean maps to 0.5.
  GrayImage m = testing::random_gray(9, 9, 6, 0.1, 0.9);
  double mean = 0;
  for (double v : m.pixels()) mean += v;
  mean /= 81.0;
  CHECK(std::abs(contrast_stretch_value(mean, mean, 3.0) - 0.5) <= 1e-12);

  double prev = -1;
  for (int i = 0; i <= 500; ++i) {
    const double v = contrast_stretch_value(i / 500.0, 0.37, 3.0);
    CHECK(v > prev);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
}

TEST_CASE("global histogram equalization") {
  const GrayImage uni = every_level(3);
  const GrayImage eq = hist_equalize(uni);
  for (std::size_t i = 0; i < uni.size(); ++i) CHECK(std::abs(eq.pixels()[i] - uni.pixels()[i]) <= 1.0 / 256.0);

  GrayImage two(10, 10, 0.2);
  for (int y = 5; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) two(x, y) = 0.8;
  }
  const GrayImage t = hist_equalize(two);
  CHECK(t(0, 0) == 0.5);
  CHECK(t(0, 9) == 1.0);

  const GrayImage flat = hist_equalize(GrayImage(7, 5, 0.3));
  for (double v : flat.pixels()) CHECK(v == flat(0, 0));

  const GrayImage r = testing::random_gray(40, 40, 9);
  const GrayImage re = hist_equalize(r);
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t j = i + 1; j < std::min(r.size(), i + 40); ++j) {
      if (r.pixels()[i] <= r.pixels()[j]) REQUIRE(re.pixels()[i] <= re.pixels()[j]);
    }
  }
}

TEST_CASE("histogram clipping bounds and conservation") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    Histogram h{};
    std::size_t total = 0;
    std::uniform_int_distribution<int> bin(0, 40);
    const int n = 400 + trial * 3;
    for (int i = 0; i < n; ++i) {
      ++h[static_cast<std::size_t>(bin(rng))];
      ++total;
    }
    const std::size_t clip = 2 + trial % 9;
    const Histogram before = h;
    const std::size_t excess = clip_histogram(h, clip);
    std::size_t after = 0, expect_excess = 0;
    for (int b = 0; b < kHistBins; ++b) {
      after += h[b];
      expect_excess += before[b] > clip ? before[b] - clip : 0;
    }
    CHECK(after == total);
    CHECK(excess == expect_excess);
    const std::size_t ceiling = clip + excess / kHistBins + 1;
    for (auto c : h) REQUIRE(c <= std::max(ceiling, std::size_t{0}));
  }
}

TEST_CASE("CLAHE") {
  const GrayImage flat(60, 45, 0.42);
  const GrayImage cf = clahe(flat);
  for (double v : cf.pixels()) CHECK(v == cf(0, 0));

  // A single tile covering the image with clip 1 is global equalization.
  const GrayImage r = testing::random_gray(24, 24, 3, 0.2, 0.6);
  CHECK(clahe(r, {24, 1.0}) == hist_equalize(r));

  const GrayImage wide = testing::random_gray(100, 70, 4);
  const GrayImage out = clahe(wide);
  CHECK(is_valid(out));
  CHECK_THROWS_AS(clahe(GrayImage(10, 10), {20, 0.005}), Error);
  CHECK_THROWS_AS(clahe(wide, {20, 0.0}), Error);
}

TEST_CASE("CLAHE raises entropy on a low-contrast eye") {
  SyntheticEyeSpec spec;
  spec.level[0] = 0.46;
  spec.level[1] = 0.54;
  spec.level[2] = 0.42;
  spec.level[3] = 0.36;
  spec.noise_variance = 0.0004;
  const GrayImage img = render_synthetic_eye(spec, 3).image;
  const double before = shannon_entropy(img);
  const double after = shannon_entropy(clahe(img));
  CHECK(after > before);
}
