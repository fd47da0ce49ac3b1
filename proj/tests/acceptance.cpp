// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sipseg/cli.hpp"
#include "sipseg/degrade.hpp"
#include "sipseg/enhance.hpp"
#include "sipseg/io.hpp"
#include "sipseg/metrics/confusion.hpp"
#include "sipseg/metrics/curves.hpp"
#include "sipseg/metrics/quality.hpp"
#include "sipseg/metrics/segmentation.hpp"
#include "sipseg/net/layers.hpp"
#include "sipseg/net/network.hpp"
#include "sipseg/net/training.hpp"
#include "sipseg/periocular.hpp"
#include "sipseg/pipeline.hpp"
#include "sipseg/synth.hpp"

namespace fs = std::filesystem;
using namespace sipseg;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::pair<LabelMap, LabelMap> metric_pair(std::uint64_t seed) {
  return {testing::random_labels(16, 16, 9000 + 2 * seed), testing::random_labels(16, 16, 9001 + 2 * seed)};
}

// 1
Outcome metric_oracle_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto [g, p] = metric_pair(s);
    const auto cm = metrics::confusion_matrix(g, p);
    const auto per = metrics::class_metrics(cm);
    const auto img = metrics::image_scores(cm);
    const auto o = testing::metric_oracle(g, p);
    auto d = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
    for (int c = 0; c < 4; ++c) {
      const auto& r = per[static_cast<std::size_t>(c)];
      d(r.accuracy, o.A[c]);
      d(r.precision, o.P[c]);
      d(r.recall, o.R[c]);
      d(r.specificity, o.S[c]);
      d(r.npv, o.NPV[c]);
      d(r.iou, o.IoU[c]);
      d(r.dice, o.Dice[c]);
      d(r.f1, o.F1[c]);
      d(r.fpr, o.FPR[c]);
      d(r.fnr, o.FNR[c]);
      d(r.nice2, o.N2[c]);
    }
    d(img.mean_accuracy, o.I);
    d(img.global_accuracy, o.GA);
    d(img.miou, o.MIoU);
    d(img.fwiou, o.FWIoU);
    d(img.dice, o.MDice);
    d(img.nice1, o.Nice1);
    d(img.nice2, o.Nice2);
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-12 && t < 5.0, fmt("100 map pairs, max deviation %.3g, %.3f s", worst, t)};
}

// 2
Outcome dice_jaccard_identity() {
  double worst = 0;
  bool n2_exact = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto [g, p] = metric_pair(s);
    for (const auto& r : metrics::class_metrics(metrics::confusion_matrix(g, p))) {
      worst = std::max(worst, std::abs(r.dice - 2 * r.iou / (1 + r.iou)));
      n2_exact &= r.nice2 == (r.fpr + r.fnr) / 2;
    }
  }
  return {worst <= 1e-12 && n2_exact,
          fmt("max |Dice - 2IoU/(1+IoU)| %.3g, N2 exact: %s", worst, n2_exact ? "yes" : "no")};
}

// 3
Outcome dio_recovery() {
  SyntheticEyeRanges ranges;
  ranges.pupil_radius_min = 10;
  ranges.pupil_radius_max = 40;
  ranges.pupil_contrast_min = 0.3;
  ranges.noise_variance_max = 0.01;
  int hits = 0;
  double slowest = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const SyntheticEyeSpec spec = sample_eye_spec(ranges, 1000 + i);
    const SyntheticEye eye = render_synthetic_eye(spec, 1000 + i);
    const auto t0 = Clock::now();
    try {
      const PupilCircle c = dio_locate_pupil(eye.image);
      hits += std::hypot(c.x - spec.pupil_x, c.y - spec.pupil_y) <= 2.0 &&
              std::abs(c.radius - spec.pupil_radius) <= 2.0;
    } catch (const Error&) {
    }
    slowest = std::max(slowest, seconds_since(t0));
  }
  return {hits >= 190 && slowest < 3.0, fmt("%d/200 within 2 px, slowest %.2f s", hits, slowest)};
}

// 4
Outcome atmed_oracle() {
  double worst = 0;
  bool bounded = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const GrayImage f = testing::random_gray(9, 9, 500 + s);
    const GrayImage out = atmed_filter(f, {3});
    for (int y = 0; y < 9; ++y) {
      for (int x = 0; x < 9; ++x) {
        worst = std::max(worst, std::abs(out(x, y) - testing::atmed_oracle(f, x, y, 3)));
        double lo = 1, hi = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            lo = std::min(lo, f.clamped(x + dx, y + dy));
            hi = std::max(hi, f.clamped(x + dx, y + dy));
          }
        }
        bounded &= out(x, y) >= lo && out(x, y) <= hi;
      }
    }
  }
  return {worst <= 1e-12 && bounded, fmt("50 images, max deviation %.3g, window-bounded: %s", worst, bounded ? "yes" : "no")};
}

// 5
Outcome enhancement() {
  bool fixed = true;
  for (double v : {0.0, 0.2, 0.5, 0.73, 1.0}) {
    const GrayImage c(64, 48, v);
    for (const GrayImage& out : {contrast_stretch(c), hist_equalize(c), clahe(c)}) {
      for (double p : out.pixels()) fixed &= p == out(0, 0);
    }
  }
  SyntheticEyeSpec spec;
  spec.level[0] = 0.46;
  spec.level[1] = 0.54;
  spec.level[2] = 0.42;
  spec.level[3] = 0.36;
  spec.noise_variance = 0.0004;
  const GrayImage eye = render_synthetic_eye(spec, 3).image;
  const double h0 = shannon_entropy(eye), h1 = shannon_entropy(clahe(eye));
  double mid = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const GrayImage img = testing::random_gray(32, 32, 700 + s, 0.05, 0.95);
    double m = 0;
    for (double v : img.pixels()) m += v;
    m /= static_cast<double>(img.size());
    mid = std::max(mid, std::abs(contrast_stretch_value(m, m, 3.0) - 0.5));
  }
  return {fixed && h1 > h0 && mid <= 1e-12, fmt("constant in/constant out: %s, entropy %.4f -> %.4f bits, |out(m)-0.5| %.3g",
                                                fixed ? "yes" : "no", h0, h1, mid)};
}

// 6
Outcome nlm_denoising() {
  const NlmConfig cfg{7.0 / 255.0, 25, 17, 0.01};
  const GrayImage flat(48, 48, 0.4);
  const bool identity = nlm_filter(flat, cfg) == flat;
  double worst_gain = 1;
  for (std::uint64_t s = 0; s < 3; ++s) {
    GrayImage clean(64, 64, 0.7);
    const double cx = 28 + 4.0 * s, r = 12 + 3.0 * s;
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        if ((x - cx) * (x - cx) + (y - 32) * (y - 32) <= r * r) clean(x, y) = 0.2;
      }
    }
    std::mt19937_64 rng(60 + s);
    std::normal_distribution<double> n(0.0, 0.1);
    GrayImage noisy = clean;
    for (double& v : noisy.pixels()) v = std::clamp(v + n(rng), 0.0, 1.0);
    const double before = metrics::mse(clean, noisy);
    const double after = metrics::mse(clean, nlm_filter(noisy, cfg));
    worst_gain = std::min(worst_gain, 1 - after / before);
  }
  return {identity && worst_gain >= 0.30,
          fmt("constant identity: %s, worst MSE reduction %.1f%% over 3 disks", identity ? "yes" : "no", 100 * worst_gain)};
}

// 7
Outcome network_shapes() {
  const auto t0 = Clock::now();
  const net::NetworkSpec spec = net::build_sipsegnet();
  const net::Weights w = net::random_weights(spec, 11);
  const net::Tensor x = net::image_to_input(testing::random_gray(224, 224, 12), spec);
  const net::ForwardResult r = net::forward(spec, w, x);
  std::map<std::string, net::Shape> got;
  for (const auto& s : r.shapes) got[s.name] = s.shape;

  // (layer, channels, side) for every row of the reference layer table.
  const int enc_convs[5] = {2, 2, 3, 3, 3};
  const std::size_t width[5] = {64, 128, 256, 512, 512};
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> expect = {{"input", 3, 224}};
  for (int b = 1; b <= 5; ++b) {
    const std::size_t side = 224 >> (b - 1);
    expect.emplace_back("e" + std::to_string(b) + ".c" + std::to_string(enc_convs[b - 1]) + ".relu", width[b - 1], side);
    expect.emplace_back("e" + std::to_string(b) + ".pool", width[b - 1], side / 2);
  }
  for (int b = 5; b >= 1; --b) {
    const std::size_t side = 224 >> (b - 1);
    expect.emplace_back("d" + std::to_string(b) + ".unpool", width[b - 1], side);
    expect.emplace_back("d" + std::to_string(b) + ".c1.relu", width[b - 1], side);
  }
  expect.emplace_back("softmax", 4, 224);
  int bad = 0;
  for (const auto& [name, ch, side] : expect) {
    const auto it = got.find(name);
    if (it == got.end() || it->second != net::Shape{1, ch, side, side}) ++bad;
  }

  double sum_dev = 0;
  const auto& p = r.probabilities;
  const std::size_t hw = 224 * 224;
  for (std::size_t i = 0; i < hw; ++i) {
    double s = 0;
    for (std::size_t c = 0; c < 4; ++c) s += p[c * hw + i];
    sum_dev = std::max(sum_dev, std::abs(s - 1));
  }

  // Unpooling scatters every pooled maximum back to its source cell and zeroes the rest.
  const net::Tensor& xi = x;
  const net::PoolResult pr = net::maxpool2_with_indices(xi);
  const net::Tensor up = net::max_unpool2(pr.pooled, pr.indices, xi.shape());
  bool scatter = true;
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < up.size(); ++i) {
    if (up[i] != 0) {
      scatter &= up[i] == xi[i];
      ++nonzero;
    }
  }
  std::size_t pooled_nonzero = 0;
  for (double v : pr.pooled.data()) pooled_nonzero += v != 0;
  scatter &= nonzero == pooled_nonzero;

  const net::Tensor& k = w.at("e1.c1.weight");
  const net::Tensor y = net::conv3x3(x, k);
  const auto o = testing::conv3x3_oracle({x.data().begin(), x.data().end()}, 1, 3, 224, 224,
                                         {k.data().begin(), k.data().end()}, 64);
  double conv_dev = 0;
  for (std::size_t i = 0; i < y.size(); ++i) conv_dev = std::max(conv_dev, std::abs(y[i] - o[i]));
  const double t = seconds_since(t0);
  return {bad == 0 && sum_dev <= 1e-5 && scatter && conv_dev <= 1e-6 && t < 30.0,
          fmt("%zu/%zu layer shapes match, softmax sum dev %.2g, scatter: %s, conv dev %.2g, %.1f s",
              expect.size() - static_cast<std::size_t>(bad), expect.size(), sum_dev, scatter ? "yes" : "no", conv_dev, t)};
}

// 8
Outcome residual_model() {
  bool exact = true;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const GrayImage x = testing::random_dyadic(40, 30, 800 + s);
    const GrayImage y = testing::random_dyadic(40, 30, 900 + s);
    exact &= reconstruct(y, residual(y, x)) == x;
  }
  double worst = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    std::vector<SignedImage> r, t;
    for (int b = 0; b < 4; ++b) {
      r.push_back(residual(testing::random_gray(50, 50, 1000 + s * 8 + b), testing::random_gray(50, 50, 2000 + s * 8 + b)));
      t.push_back(residual(testing::random_gray(50, 50, 3000 + s * 8 + b), testing::random_gray(50, 50, 4000 + s * 8 + b)));
    }
    long double oracle = 0;
    for (int b = 0; b < 4; ++b) {
      for (int yy = 0; yy < 50; ++yy) {
        for (int xx = 0; xx < 50; ++xx) {
          const long double d = static_cast<long double>(r[b](xx, yy)) - t[b](xx, yy);
          oracle += 0.5L * d * d;
        }
      }
    }
    oracle /= 4;
    worst = std::max(worst, static_cast<double>(std::abs(half_mse(r, t) - oracle)));
  }
  std::mt19937_64 rng(77);
  int outside = 0;
  const DistortionRanges ranges;
  for (int i = 0; i < 10000; ++i) {
    const DistortionParams p = sample_distortion(ranges, rng);
    bool ok = p.noise || p.scale || p.rotate || p.blur;
    if (p.noise) ok &= p.noise_mean == 0 && p.noise_variance >= 0.005 && p.noise_variance <= 0.015;
    if (p.scale) ok &= p.scale_factor >= 1.05 && p.scale_factor <= 1.10;
    if (p.rotate) ok &= p.rotation_deg >= -5 && p.rotation_deg <= 5;
    if (p.blur) {
      ok &= p.blur_length_h >= 1 && p.blur_length_h <= 9 && p.blur_length_v >= 1 && p.blur_length_v <= 9;
      ok &= p.blur_theta_deg >= -20 && p.blur_theta_deg <= 20;
    }
    outside += !ok;
  }
  return {exact && worst <= 1e-12 && outside == 0,
          fmt("roundtrip exact: %s, half-MSE dev %.3g, %d/10000 draws out of range", exact ? "yes" : "no", worst, outside)};
}

// 9
Outcome training_math() {
  // Weights and frequencies are count ratios N/c and c/N; their product is checked in integers,
  // and the binary64 product is reported for reference.
  bool rational = true;
  double ulp_dev = 0;
  std::vector<LabelMap> maps;
  for (std::uint64_t s = 0; s < 6; ++s) maps.push_back(testing::random_labels(37, 29, 40 + s));
  const net::ClassWeights cw = net::class_weights(maps);
  for (std::size_t c = 0; c < cw.num_classes(); ++c) {
    const unsigned __int128 num = static_cast<unsigned __int128>(cw.total) * cw.counts[c];
    const unsigned __int128 den = static_cast<unsigned __int128>(cw.counts[c]) * cw.total;
    rational &= num == den;
    ulp_dev = std::max(ulp_dev, std::abs(cw.weight(c) * cw.frequency(c) - 1) / std::numeric_limits<double>::epsilon());
  }

  // Loss against a direct triple loop over images, channels and pixels.
  const std::size_t N = 2, K = 4, H = 5, W = 6, HW = H * W;
  std::mt19937_64 rng(5);
  std::gamma_distribution<double> gam(1.0, 1.0);
  net::Tensor prob({N, K, H, W});
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t i = 0; i < HW; ++i) {
      double v[4], s = 0;
      for (double& e : v) s += (e = gam(rng));
      for (std::size_t c = 0; c < K; ++c) prob[(n * K + c) * HW + i] = v[c] / s;
    }
  }
  const std::vector<LabelMap> lab = {testing::random_labels(6, 5, 1), testing::random_labels(6, 5, 2)};
  const net::Tensor target = net::one_hot(lab);
  const std::vector<double> wt = {0.5, 1.5, 2.0, 4.0};
  double oracle = 0;
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t i = 0; i < HW; ++i) {
      const double wi = wt[lab[n].pixels()[i]];
      for (std::size_t c = 0; c < K; ++c) {
        const double p = std::clamp(prob[(n * K + c) * HW + i], net::kBceEps, 1 - net::kBceEps);
        const double t = target[(n * K + c) * HW + i];
        oracle -= wi * (t * std::log(p) + (1 - t) * std::log(1 - p));
      }
    }
  }
  oracle /= static_cast<double>(N * HW);
  const double loss_dev = std::abs(net::weighted_bce_loss(prob, target, wt) - oracle);

  std::vector<double> wv = {1.0};
  net::SgdmState st;
  int iters = 0;
  while (iters < 200 && std::abs(wv[0]) >= 1e-3) {
    const std::vector<double> g = {wv[0]};
    net::sgdm_step(wv, g, st, 0.1, 0.9);
    ++iters;
  }
  const bool converged = std::abs(wv[0]) < 1e-3;
  return {rational && ulp_dev <= 1 && loss_dev <= 1e-10 && converged,
          fmt("w*f=1 in integers: %s (binary64 off by <= %.0f ulp), loss dev %.3g, |w|<1e-3 after %d steps", rational ? "yes" : "no",
              ulp_dev, loss_dev, iters)};
}

// 10
Outcome curves() {
  const LabelMap g = testing::random_labels(64, 64, 31);
  const std::size_t n = g.size();
  net::Tensor onehot({4, 64, 64});
  for (std::size_t i = 0; i < n; ++i) onehot[g.pixels()[i] * n + i] = 1.0;
  double perfect = 1;
  for (const auto& c : metrics::curves_and_auc(g, onehot)) perfect = std::min(perfect, c.roc_auc);

  std::mt19937_64 rng(32);
  std::gamma_distribution<double> gam(1.0, 1.0);
  net::Tensor rnd({4, 64, 64});
  for (std::size_t i = 0; i < n; ++i) {
    double v[4], s = 0;
    for (double& e : v) s += (e = gam(rng));
    for (std::size_t c = 0; c < 4; ++c) rnd[c * n + i] = v[c] / s;
  }
  double lo = 1, hi = 0;
  for (const auto& c : metrics::curves_and_auc(g, rnd)) {
    lo = std::min(lo, c.roc_auc);
    hi = std::max(hi, c.roc_auc);
  }
  const auto grid = metrics::threshold_grid();
  bool step = grid.front() == 0.0 && grid.back() == 1.0 && grid.size() == 335;
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) step &= std::abs(grid[k] - 0.003 * static_cast<double>(k)) <= 1e-12;
  return {perfect == 1.0 && lo >= 0.45 && hi <= 0.55 && step,
          fmt("perfect AUC %.3f, random AUC in [%.3f, %.3f], grid of %zu thresholds at 0.003", perfect, lo, hi, grid.size())};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Every output file keyed by its relative path; the manifest loses its timing fields.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::string bytes = slurp(e.path());
    if (e.path().filename() == "manifest.json") {
      json m = json::parse(bytes);
      for (auto& entry : m["entries"]) entry.erase("elapsed_ms");
      bytes = m.dump();
    }
    out[fs::relative(e.path(), root).generic_string()] = std::move(bytes);
  }
  return out;
}

// 11
Outcome end_to_end(const testing::TempDir& dir) {
  const auto t0 = Clock::now();
  std::map<std::string, std::string> runs[2];
  bool perfect = true;
  for (int k = 0; k < 2; ++k) {
    const fs::path root = dir / ("run" + std::to_string(k));
    const std::string eyes = (root / "eyes").string(), pre = (root / "pre").string(), rep = (root / "report.json").string();
    if (cli::run({"synth", "--count", "20", "--seed", "42", "--out", eyes}) != 0 ||
        cli::run({"preprocess", "--in", eyes, "--out", pre, "--seed", "42"}) != 0 ||
        cli::run({"evaluate", "--gt", eyes, "--pred", eyes, "--out", rep}) != 0) {
      return {false, "a CLI stage exited non-zero"};
    }
    const json r = json::parse(slurp(rep));
    for (const auto& [k2, v] : r["aggregate"].items()) {
      perfect &= (k2 == "Nice1" || k2 == "Nice2") ? v == 0.0 : v == 1.0;
    }
    for (const auto& [cls, m] : r["per_class"].items()) {
      for (const auto& [k2, v] : m.items()) perfect &= (k2 == "FPR" || k2 == "FNR" || k2 == "N2") ? v == 0.0 : v == 1.0;
    }
    perfect &= r["meta"]["images"] == 20;
    runs[k] = snapshot(root);
  }
  const double t = seconds_since(t0);
  const bool same = runs[0] == runs[1];
  return {same && perfect && t < 120.0, fmt("%zu files byte-identical across runs: %s, all-perfect report: %s, %.1f s",
                                            runs[0].size(), same ? "yes" : "no", perfect ? "yes" : "no", t)};
}

// 12
Outcome suppression_contract(const testing::TempDir& dir) {
  int runs = 0, broken = 0;
  std::size_t masked = 0;
  for (int i = 0; i < 20; ++i) {
    const fs::path p = dir / "run0" / "eyes" / (std::to_string(i) + ".pgm");
    if (!fs::exists(p)) return {false, "end-to-end corpus missing"};
    const PipelineResult r = preprocess_pipeline(read_gray(p));
    ++runs;
    for (std::size_t k = 0; k < r.preprocessed.size(); ++k) {
      const double want = r.periocular.pixels()[k] ? r.fuzzified.pixels()[k] : r.filtered.pixels()[k];
      broken += r.preprocessed.pixels()[k] != want;
      masked += r.periocular.pixels()[k];
    }
  }
  return {runs == 20 && broken == 0, fmt("%d pipeline runs, %zu masked pixels, %d mismatches", runs, masked, broken)};
}

}  // namespace

int main() {
  testing::TempDir dir("acceptance");
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric oracle equivalence", metric_oracle_equivalence},
      {"Dice-Jaccard and N2 identities", dice_jaccard_identity},
      {"DIO pupil recovery", dio_recovery},
      {"ATMED oracle and bounds", atmed_oracle},
      {"enhancement fixed points, entropy, midpoint", enhancement},
      {"NLM identity and denoising", nlm_denoising},
      {"network shapes, softmax, unpool, conv", network_shapes},
      {"residual model, half-MSE, distortion ranges", residual_model},
      {"class weights, weighted BCE, SGDM", training_math},
      {"ROC/PR curves and threshold grid", curves},
      {"end-to-end determinism", [&] { return end_to_end(dir); }},
      {"suppression contract", [&] { return suppression_contract(dir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
