// Parallel kernels against their serial references on the same inputs.

#include <benchmark/benchmark.h>

#include <random>

#include "sipseg/net/layers.hpp"
#include "sipseg/periocular.hpp"
#include "sipseg/reference.hpp"
#include "sipseg/restore.hpp"
#include "sipseg/synth.hpp"

using namespace sipseg;

namespace {

const GrayImage& eye() {
  static const GrayImage img = [] {
    SyntheticEyeSpec spec;
    spec.noise_variance = 0.002;
    return render_synthetic_eye(spec, 1).image;
  }();
  return img;
}

const GrayImage& small_eye() {
  static const GrayImage img = [] {
    SyntheticEyeSpec spec;
    spec.width = spec.height = 64;
    spec.pupil_x = spec.pupil_y = 32;
    spec.pupil_radius = 8;
    spec.iris_radius = 16;
    spec.sclera_axis_x = 26;
    spec.sclera_axis_y = 20;
    spec.noise_variance = 0.002;
    return render_synthetic_eye(spec, 2).image;
  }();
  return img;
}

BinaryMask sparse_mask() {
  std::mt19937_64 rng(3);
  BinaryMask m(eye().width(), eye().height());
  for (auto& v : m.pixels()) v = rng() % 50 == 0;
  return m;
}

net::Tensor random_tensor(net::Shape s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, 1);
  net::Tensor t(std::move(s));
  for (double& v : t.data()) v = n(rng);
  return t;
}

const NlmConfig kNlm{7.0 / 255.0, 11, 5, 0.0};
const AdaptiveThresholdConfig kThreshold{0.375, Polarity::Dark, 19, 0.6};

}  // namespace

static void BM_LocalMean(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(local_mean(eye(), 19));
}
static void BM_LocalMeanReference(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(reference::local_mean(eye(), 19));
}
static void BM_Threshold(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(adaptive_threshold(eye(), kThreshold));
}
static void BM_ThresholdReference(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(reference::adaptive_threshold(eye(), kThreshold));
}
static void BM_Dilate(benchmark::State& s) {
  const BinaryMask m = sparse_mask();
  for (auto _ : s) benchmark::DoNotOptimize(dilate_disk(m, 3));
}
static void BM_DilateReference(benchmark::State& s) {
  const BinaryMask m = sparse_mask();
  for (auto _ : s) benchmark::DoNotOptimize(reference::dilate_disk(m, 3));
}
static void BM_FillHoles(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(fill_holes(eye()));
}
static void BM_FillHolesReference(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(reference::fill_holes(eye()));
}
static void BM_Nlm(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(nlm_filter(small_eye(), kNlm));
}
static void BM_NlmReference(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(reference::nlm_filter(small_eye(), kNlm));
}
static void BM_Atmed(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(atmed_filter(eye(), {21}));
}
static void BM_AtmedReference(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(reference::atmed_filter(eye(), {21}));
}
static void BM_Dio(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(dio_locate_pupil(small_eye()));
}
static void BM_DioExhaustive(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(reference::dio_exhaustive(small_eye(), {}));
}
static void BM_Conv(benchmark::State& s) {
  const net::Tensor x = random_tensor({1, 32, 56, 56}, 4), w = random_tensor({32, 32, 3, 3}, 5);
  for (auto _ : s) benchmark::DoNotOptimize(net::conv3x3(x, w));
}
static void BM_ConvReference(benchmark::State& s) {
  const net::Tensor x = random_tensor({1, 32, 56, 56}, 4), w = random_tensor({32, 32, 3, 3}, 5);
  for (auto _ : s) benchmark::DoNotOptimize(reference::conv3x3(x, w));
}

BENCHMARK(BM_LocalMean)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LocalMeanReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Threshold)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThresholdReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dilate)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DilateReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FillHoles)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FillHolesReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Nlm)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NlmReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Atmed)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AtmedReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dio)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DioExhaustive)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Conv)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvReference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
