#include "sipseg/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sipseg/augment.hpp"
#include "sipseg/degrade.hpp"
#include "sipseg/io.hpp"
#include "sipseg/metrics/curves.hpp"
#include "sipseg/metrics/report.hpp"
#include "sipseg/net/network.hpp"
#include "sipseg/net/training.hpp"
#include "sipseg/net/weights_io.hpp"
#include "sipseg/parallel.hpp"
#include "sipseg/pipeline.hpp"
#include "sipseg/synth.hpp"

namespace sipseg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Input problems map to exit 1, configuration problems to exit 2.
struct ConfigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = spdlog::stderr_color_mt("sipseg");
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("SIPSEG_LOG")) l->set_level(spdlog::level::from_str(env));
    return l;
  }();
  return log;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

constexpr const char* kLabelSuffix = ".labels.pgm";

bool is_label_file(const fs::path& p) { return ends_with(p.filename().string(), kLabelSuffix); }

bool is_image_file(const fs::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".pgm" || ext == ".png";
}

// Name without extension; label files drop the whole ".labels.pgm".
std::string stem_of(const fs::path& p) {
  const std::string name = p.filename().string();
  if (ends_with(name, kLabelSuffix)) return name.substr(0, name.size() - std::strlen(kLabelSuffix));
  return p.stem().string();
}

std::vector<fs::path> list_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputFailure("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& p : list_dir(dir)) {
    if (is_image_file(p) && !is_label_file(p)) out.push_back(p);
  }
  return out;
}

std::vector<fs::path> list_label_maps(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& p : list_dir(dir)) {
    if (is_label_file(p)) out.push_back(p);
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputFailure("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputFailure("cannot write " + path.string());
  out << text;
  if (!out) throw InputFailure("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigFailure("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigFailure(path.string() + ": " + e.what());
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// Per-file failures are collected and reported together.
struct Failures {
  std::vector<std::string> items;
  void add(const fs::path& p, const std::string& why) { items.push_back(p.filename().string() + ": " + why); }
  int report(const char* what) const {
    if (items.empty()) return kExitOk;
    std::cerr << what << ": " << items.size() << " file(s) failed\n";
    for (const auto& s : items) std::cerr << "  " << s << "\n";
    return kExitInput;
  }
};

struct Common {
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
  int jobs = 0;
};

void add_common(CLI::App* cmd, Common& c, bool want_config) {
  cmd->add_option("--out", c.out, "Output directory or file")->required();
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--jobs", c.jobs, "Worker threads (0 = all)")->check(CLI::NonNegativeNumber);
  if (want_config) cmd->add_option("--config", c.config, "JSON configuration");
}

// ---- synth

int cmd_synth(const Common& c, int count, const SyntheticEyeRanges& ranges) {
  if (count < 1) throw ConfigFailure("--count must be >= 1");
  const fs::path out(c.out);
  ensure_dir(out);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = augmentation_seed(c.seed, 0, static_cast<std::uint64_t>(i));
    const SyntheticEyeSpec spec = sample_eye_spec(ranges, s);
    const SyntheticEye eye = render_synthetic_eye(spec, s);
    write_gray(eye.image, out / (std::to_string(i) + ".pgm"));
    write_labels(eye.labels, out / (std::to_string(i) + kLabelSuffix));
  }
  logger()->info("wrote {} synthetic eyes to {}", count, out.string());
  return kExitOk;
}

// ---- preprocess

const char* const kStages[] = {"denoised", "enhanced", "holes", "filtered", "periocular_raw", "periocular",
                               "fuzzified"};

int cmd_preprocess(const Common& c, const std::string& in_dir, bool emit_stages) {
  PipelineConfig cfg;
  if (!c.config.empty()) {
    try {
      cfg = pipeline_config_from_json(read_json(c.config));
    } catch (const Error& e) {
      throw ConfigFailure(e.what());
    }
  }
  const auto inputs = list_images(in_dir);
  if (inputs.empty()) {
    std::cerr << "preprocess: found 0 input images in " << in_dir << "\n";
    return kExitInput;
  }
  const fs::path out(c.out);
  ensure_dir(out);

  std::vector<json> entries(inputs.size());
  std::vector<std::string> errors(inputs.size());
  const int jobs = c.jobs > 0 ? c.jobs : max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const std::string stem = stem_of(inputs[i]);
      const PipelineResult r = preprocess_pipeline(read_gray(inputs[i]), cfg);
      write_gray(r.preprocessed, out / (stem + ".pgm"));
      if (emit_stages) {
        write_gray(r.denoised, out / (stem + ".denoised.pgm"));
        write_gray(r.enhanced, out / (stem + ".enhanced.pgm"));
        write_mask(r.holes, out / (stem + ".holes.pgm"));
        write_gray(r.filtered, out / (stem + ".filtered.pgm"));
        write_mask(r.periocular_raw, out / (stem + ".periocular_raw.pgm"));
        write_mask(r.periocular, out / (stem + ".periocular.pgm"));
        write_gray(r.fuzzified, out / (stem + ".fuzzified.pgm"));
      }
      json e = {{"input", inputs[i].filename().string()}, {"output", stem + ".pgm"}};
      if (r.pupil) {
        e["pupil"] = {{"x", r.pupil->x}, {"y", r.pupil->y}, {"radius", r.pupil->radius}};
      } else {
        e["pupil"] = nullptr;
      }
      if (!r.warning.empty()) e["warning"] = r.warning;
      e["elapsed_ms"] = elapsed_ms(t0);
      entries[i] = std::move(e);
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  }

  Failures failures;
  json manifest = {{"config", to_json(cfg)}, {"seed", c.seed}, {"entries", json::array()}};
  if (emit_stages) manifest["stages"] = std::vector<std::string>(std::begin(kStages), std::end(kStages));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!errors[i].empty()) {
      failures.add(inputs[i], errors[i]);
      continue;
    }
    if (entries[i].contains("warning")) logger()->warn("{}: {}", inputs[i].filename().string(), entries[i]["warning"].get<std::string>());
    manifest["entries"].push_back(entries[i]);
  }
  manifest["failures"] = failures.items;
  write_json(out / "manifest.json", manifest);
  return failures.report("preprocess");
}

// ---- degrade

DistortionRanges distortion_ranges_from(const std::string& path) {
  DistortionRanges r;
  if (path.empty()) return r;
  const json j = read_json(path);
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "noise_variance") {
        r.noise_variance_min = v.at(0), r.noise_variance_max = v.at(1);
      } else if (k == "scale") {
        r.scale_min = v.at(0), r.scale_max = v.at(1);
      } else if (k == "rotation_deg") {
        r.rotation_min_deg = v.at(0), r.rotation_max_deg = v.at(1);
      } else if (k == "blur_length") {
        r.blur_length_min = v.at(0), r.blur_length_max = v.at(1);
      } else if (k == "blur_theta_deg") {
        r.blur_theta_min_deg = v.at(0), r.blur_theta_max_deg = v.at(1);
      } else {
        throw ConfigFailure("unknown degradation key '" + k + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigFailure(std::string("bad degradation range: ") + e.what());
  }
  if (r.noise_variance_min < 0 || r.noise_variance_min > r.noise_variance_max || r.scale_min <= 0 ||
      r.scale_min > r.scale_max || r.rotation_min_deg > r.rotation_max_deg || r.blur_length_min < 1 ||
      r.blur_length_min > r.blur_length_max || r.blur_theta_min_deg > r.blur_theta_max_deg) {
    throw ConfigFailure("degradation ranges must be ordered and positive where required");
  }
  return r;
}

json params_json(const DistortionParams& p) {
  json j = json::object();
  if (p.noise) j["noise"] = {{"mean", p.noise_mean}, {"variance", p.noise_variance}, {"seed", p.noise_seed}};
  if (p.scale) j["scale"] = p.scale_factor;
  if (p.rotate) j["rotation_deg"] = p.rotation_deg;
  if (p.blur) j["blur"] = {{"length_h", p.blur_length_h}, {"length_v", p.blur_length_v}, {"theta_deg", p.blur_theta_deg}};
  return j;
}

std::uint64_t file_seed(std::uint64_t base, std::size_t index) {
  return augmentation_seed(base, 1, static_cast<std::uint64_t>(index));
}

int cmd_degrade(const Common& c, const std::string& in_dir) {
  const DistortionRanges ranges = distortion_ranges_from(c.config);
  const auto inputs = list_images(in_dir);
  if (inputs.empty()) {
    std::cerr << "degrade: found 0 input images in " << in_dir << "\n";
    return kExitInput;
  }
  const fs::path out(c.out);
  ensure_dir(out);
  Failures failures;
  json manifest = {{"seed", c.seed}, {"entries", json::array()}};
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      std::mt19937_64 rng(file_seed(c.seed, i));
      const DistortionParams p = sample_distortion(ranges, rng);
      const std::string stem = stem_of(inputs[i]);
      write_gray(apply_distortion(read_gray(inputs[i]), p), out / (stem + ".pgm"));
      manifest["entries"].push_back({{"input", inputs[i].filename().string()}, {"output", stem + ".pgm"},
                                     {"distortions", params_json(p)}});
    } catch (const std::exception& e) {
      failures.add(inputs[i], e.what());
    }
  }
  manifest["failures"] = failures.items;
  write_json(out / "manifest.json", manifest);
  return failures.report("degrade");
}

// ---- patches

int cmd_patches(const Common& c, const std::string& in_dir, int count, int size) {
  if (count < 1 || size < 2) throw ConfigFailure("--count must be >= 1 and --size >= 2");
  const DistortionRanges ranges = distortion_ranges_from(c.config);
  const auto inputs = list_images(in_dir);
  if (inputs.empty()) {
    std::cerr << "patches: found 0 input images in " << in_dir << "\n";
    return kExitInput;
  }
  const fs::path out(c.out);
  ensure_dir(out);
  Failures failures;
  json manifest = {{"seed", c.seed}, {"patch_size", size}, {"residual_encoding", "(r+1)/2"}, {"pairs", json::array()}};
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      const GrayImage x = read_gray(inputs[i]);
      std::mt19937_64 rng(file_seed(c.seed, i));
      const DistortionParams p = sample_distortion(ranges, rng);
      const GrayImage y = apply_distortion(x, p);
      const auto pairs = extract_patch_pairs(x, y, count, rng(), size);
      const std::string stem = stem_of(inputs[i]);
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const std::string base = stem + "." + std::to_string(k);
        write_gray(pairs[k].degraded, out / (base + ".degraded.pgm"));
        SignedImage enc = pairs[k].residual;
        for (double& v : enc.pixels()) v = 0.5 * (v + 1.0);
        write_gray(clamp01(std::move(enc)), out / (base + ".residual.pgm"));
        manifest["pairs"].push_back({{"source", inputs[i].filename().string()},
                                     {"degraded", base + ".degraded.pgm"},
                                     {"residual", base + ".residual.pgm"},
                                     {"row", pairs[k].row},
                                     {"col", pairs[k].col}});
      }
    } catch (const std::exception& e) {
      failures.add(inputs[i], e.what());
    }
  }
  manifest["failures"] = failures.items;
  write_json(out / "manifest.json", manifest);
  return failures.report("patches");
}

// ---- augment

int cmd_augment(const Common& c, const std::string& in_dir, std::uint64_t epoch) {
  const auto labels = list_label_maps(in_dir);
  if (labels.empty()) {
    std::cerr << "augment: found 0 label maps in " << in_dir << "\n";
    return kExitInput;
  }
  const fs::path out(c.out);
  ensure_dir(out);
  Failures failures;
  json manifest = {{"seed", c.seed}, {"epoch", epoch}, {"entries", json::array()}};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    try {
      const std::string stem = stem_of(labels[i]);
      const fs::path img_path = fs::path(in_dir) / (stem + ".pgm");
      const AugmentationParams p = sample_augmentation(augmentation_seed(c.seed, epoch, i));
      const AugmentedSample s = apply_augmentation(read_gray(img_path), read_labels(labels[i]), p);
      write_gray(s.image, out / (stem + ".pgm"));
      write_labels(s.labels, out / (stem + kLabelSuffix));
      manifest["entries"].push_back({{"stem", stem},
                                     {"flip_x", p.flip_x},
                                     {"flip_y", p.flip_y},
                                     {"rotation_deg", p.rotation_deg},
                                     {"scale", p.scale},
                                     {"dx", p.dx},
                                     {"dy", p.dy}});
    } catch (const std::exception& e) {
      failures.add(labels[i], e.what());
    }
  }
  manifest["failures"] = failures.items;
  write_json(out / "manifest.json", manifest);
  return failures.report("augment");
}

// ---- balance-weights

int cmd_balance(const Common& c, const std::string& in_dir) {
  const auto paths = list_label_maps(in_dir);
  if (paths.empty()) {
    std::cerr << "balance-weights: found 0 label maps in " << in_dir << "\n";
    return kExitInput;
  }
  std::vector<LabelMap> maps;
  for (const auto& p : paths) {
    try {
      maps.push_back(read_labels(p));
    } catch (const Error& e) {
      throw InputFailure(e.what());
    }
  }
  net::ClassWeights w;
  try {
    w = net::class_weights(maps);
  } catch (const Error& e) {
    throw InputFailure(e.what());
  }
  json classes = json::object();
  for (std::size_t k = 0; k < w.num_classes(); ++k) {
    classes[metrics::kClassNames[k]] = {{"pixels", w.counts[k]}, {"frequency", w.frequency(k)}, {"weight", w.weight(k)}};
  }
  write_json(c.out, {{"images", maps.size()}, {"total_pixels", w.total}, {"classes", classes}});
  return kExitOk;
}

// ---- split

std::vector<double> parse_ratios(const std::string& s) {
  std::vector<double> r;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      r.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigFailure("bad ratio '" + tok + "'");
    }
  }
  if (r.size() != 3) throw ConfigFailure("--ratios needs three values");
  double sum = 0;
  for (double v : r) {
    if (!(v >= 0)) throw ConfigFailure("ratios must be non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigFailure("ratios must sum to 1");
  return r;
}

// Largest-remainder allocation of n items over the ratios.
std::vector<std::size_t> allocate(std::size_t n, const std::vector<double>& ratios) {
  std::vector<std::size_t> sizes(ratios.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    const double exact = ratios[k] * static_cast<double>(n);
    sizes[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    used += sizes[k];
    rem.emplace_back(-(exact - static_cast<double>(sizes[k])), k);
  }
  std::sort(rem.begin(), rem.end());
  for (std::size_t i = 0; used < n; ++i, ++used) ++sizes[rem[i % rem.size()].second];
  return sizes;
}

int cmd_split(const Common& c, const std::string& input, const std::string& ratio_text) {
  const auto ratios = parse_ratios(ratio_text);
  std::vector<std::string> items;
  if (fs::is_directory(input)) {
    for (const auto& e : fs::recursive_directory_iterator(input)) {
      if (e.is_regular_file() && is_image_file(e.path()) && !is_label_file(e.path())) {
        items.push_back(fs::relative(e.path(), input).generic_string());
      }
    }
  } else if (fs::is_regular_file(input)) {
    const json j = read_json(input);
    const json& list = j.is_object() && j.contains("items") ? j["items"] : j;
    if (!list.is_array()) throw InputFailure("manifest must be an array of paths or {\"items\": [...]}");
    for (const auto& v : list) {
      if (!v.is_string()) throw InputFailure("manifest entries must be strings");
      items.push_back(v.get<std::string>());
    }
  } else {
    throw InputFailure("no such input " + input);
  }
  std::sort(items.begin(), items.end());
  if (std::adjacent_find(items.begin(), items.end()) != items.end()) throw InputFailure("manifest lists duplicates");
  if (items.empty()) {
    std::cerr << "split: found 0 items in " << input << "\n";
    return kExitInput;
  }

  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& it : items) groups[fs::path(it).parent_path().generic_string()].push_back(it);
  std::mt19937_64 rng(c.seed);
  const char* names[3] = {"train", "val", "test"};
  std::vector<std::vector<std::string>> subsets(3);
  json strata = json::object();
  for (auto& [dir, members] : groups) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto sizes = allocate(members.size(), ratios);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t i = 0; i < sizes[k]; ++i) subsets[k].push_back(members[pos++]);
    }
    strata[dir.empty() ? "." : dir] = sizes;
  }
  const fs::path out(c.out);
  ensure_dir(out);
  for (std::size_t k = 0; k < 3; ++k) {
    std::sort(subsets[k].begin(), subsets[k].end());
    write_json(out / (std::string(names[k]) + ".json"), {{"items", subsets[k]}});
  }
  write_json(out / "split.json", {{"seed", c.seed}, {"ratios", ratios}, {"strata", strata},
                                  {"sizes", {subsets[0].size(), subsets[1].size(), subsets[2].size()}}});
  return kExitOk;
}

// ---- forward

net::Tensor resize_probabilities(const net::Tensor& p, int width, int height) {
  const std::size_t K = p.dim(1), H = p.dim(2), W = p.dim(3);
  net::Tensor out({1, K, static_cast<std::size_t>(height), static_cast<std::size_t>(width)});
  for (int y = 0; y < height; ++y) {
    const std::size_t i = std::min(H - 1, static_cast<std::size_t>((y + 0.5) * H / height));
    for (int x = 0; x < width; ++x) {
      const std::size_t j = std::min(W - 1, static_cast<std::size_t>((x + 0.5) * W / width));
      for (std::size_t k = 0; k < K; ++k) out.at(0, k, y, x) = p.at(0, k, i, j);
    }
  }
  return out;
}

int cmd_forward(const Common& c, const std::string& in_dir, const std::string& weights_path, std::size_t input_size,
                std::size_t divisor) {
  net::NetworkSpec spec;
  try {
    spec = net::build_sipsegnet({input_size, divisor, kNumClasses});
  } catch (const Error& e) {
    throw ConfigFailure(e.what());
  }
  net::Weights w;
  if (weights_path.empty()) {
    w = net::random_weights(spec, c.seed);
  } else {
    try {
      w = net::load_weights(spec, weights_path);
    } catch (const Error& e) {
      throw InputFailure(e.what());
    }
  }
  const auto inputs = list_images(in_dir);
  if (inputs.empty()) {
    std::cerr << "forward: found 0 input images in " << in_dir << "\n";
    return kExitInput;
  }
  const fs::path out(c.out);
  ensure_dir(out);
  Failures failures;
  for (const auto& path : inputs) {
    try {
      const GrayImage img = read_gray(path);
      const net::ForwardResult r = net::forward(spec, w, net::image_to_input(img, spec));
      const std::string stem = stem_of(path);
      write_labels(net::argmax_labels(r.probabilities, img.width(), img.height()), out / (stem + kLabelSuffix));
      net::save_tensors({{"prob", resize_probabilities(r.probabilities, img.width(), img.height())}},
                        out / (stem + ".prob.sipw"));
    } catch (const std::exception& e) {
      failures.add(path, e.what());
    }
  }
  return failures.report("forward");
}

// ---- evaluate

// Label-map files keyed by stem; ".labels.pgm" files win when a directory has any.
std::map<std::string, fs::path> label_set(const fs::path& dir) {
  auto files = list_label_maps(dir);
  if (files.empty()) files = list_images(dir);
  std::map<std::string, fs::path> m;
  for (const auto& f : files) m.emplace(stem_of(f), f);
  return m;
}

int cmd_evaluate(const Common& c, const std::string& gt_dir, const std::string& pred_dir) {
  const auto gt = label_set(gt_dir);
  const auto pred = label_set(pred_dir);
  std::vector<std::string> only_gt, only_pred;
  for (const auto& [k, _] : gt) {
    if (!pred.count(k)) only_gt.push_back(k);
  }
  for (const auto& [k, _] : pred) {
    if (!gt.count(k)) only_pred.push_back(k);
  }
  if (gt.empty()) {
    std::cerr << "evaluate: found 0 ground-truth maps in " << gt_dir << "\n";
    return kExitInput;
  }
  if (!only_gt.empty() || !only_pred.empty()) {
    std::cerr << "evaluate: file sets differ\n";
    for (const auto& k : only_gt) std::cerr << "  missing prediction: " << k << "\n";
    for (const auto& k : only_pred) std::cerr << "  no ground truth: " << k << "\n";
    return kExitInput;
  }
  std::vector<metrics::ConfusionMatrix> cms;
  Failures failures;
  for (const auto& [k, gpath] : gt) {
    try {
      cms.push_back(metrics::confusion_matrix(read_labels(gpath), read_labels(pred.at(k))));
    } catch (const std::exception& e) {
      failures.add(gpath, e.what());
    }
  }
  if (const int rc = failures.report("evaluate"); rc != kExitOk) return rc;
  const auto agg = metrics::aggregate_metrics(cms);
  write_json(c.out, metrics::report_json(agg));
  return kExitOk;
}

// ---- curves

int cmd_curves(const Common& c, const std::string& gt_dir, const std::string& prob_dir, double step) {
  const auto gt = label_set(gt_dir);
  if (gt.empty()) {
    std::cerr << "curves: found 0 ground-truth maps in " << gt_dir << "\n";
    return kExitInput;
  }
  // Every pixel of every image joins one pooled sweep.
  std::vector<std::uint8_t> labels;
  std::vector<std::vector<double>> scores(kNumClasses);
  Failures failures;
  for (const auto& [k, gpath] : gt) {
    const fs::path ppath = fs::path(prob_dir) / (k + ".prob.sipw");
    try {
      const LabelMap g = read_labels(gpath);
      const net::Weights t = net::load_tensors(ppath);
      auto it = t.find("prob");
      if (it == t.end()) fail(ErrorCode::ShapeMismatch, "no 'prob' tensor in " + ppath.string());
      const net::Tensor& p = it->second;
      if (p.rank() != 4 || p.dim(0) != 1 || p.dim(1) != static_cast<std::size_t>(kNumClasses) ||
          p.dim(2) != static_cast<std::size_t>(g.height()) || p.dim(3) != static_cast<std::size_t>(g.width())) {
        fail(ErrorCode::ShapeMismatch, "probabilities " + net::to_string(p.shape()) + " do not match " + gpath.string());
      }
      labels.insert(labels.end(), g.pixels().begin(), g.pixels().end());
      const std::size_t hw = g.size();
      for (std::size_t cls = 0; cls < static_cast<std::size_t>(kNumClasses); ++cls) {
        auto d = p.data().subspan(cls * hw, hw);
        scores[cls].insert(scores[cls].end(), d.begin(), d.end());
      }
    } catch (const std::exception& e) {
      failures.add(gpath, e.what());
    }
  }
  if (const int rc = failures.report("curves"); rc != kExitOk) return rc;
  const std::size_t n = labels.size();
  LabelMap pooled(static_cast<int>(n), 1, std::move(labels));
  std::vector<double> flat;
  for (auto& s : scores) flat.insert(flat.end(), s.begin(), s.end());
  const net::Tensor prob({static_cast<std::size_t>(kNumClasses), 1, n}, std::move(flat));
  std::vector<metrics::ClassCurve> curves;
  try {
    curves = metrics::curves_and_auc(pooled, prob, step);
  } catch (const Error& e) {
    throw ConfigFailure(e.what());
  }
  const fs::path out(c.out);
  ensure_dir(out);
  for (std::size_t k = 0; k < curves.size(); ++k) {
    write_text(out / (std::string(metrics::kClassNames[k]) + ".csv"), metrics::curve_csv(curves[k]));
  }
  write_json(out / "curves.json", {{"step", step}, {"images", gt.size()}, {"classes", metrics::curves_json(curves)}});
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Ocular image preprocessing, segmentation network shapes and evaluation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common c;
  std::string in, gt, pred, prob, weights, ratios = "0.6,0.2,0.2";
  bool emit_stages = false;
  int count = 20, patch_count = 64, patch_size = kPatchSize;
  std::uint64_t epoch = 0;
  std::size_t input_size = 224, divisor = 1;
  double step = metrics::kThresholdStep;
  SyntheticEyeRanges ranges;

  auto* synth = app.add_subcommand("synth", "Render synthetic eyes with label maps");
  add_common(synth, c, false);
  synth->add_option("--count", count, "Number of eyes");
  synth->add_option("--width", ranges.width);
  synth->add_option("--height", ranges.height);

  auto* pre = app.add_subcommand("preprocess", "Run the preprocessing pipeline over a directory");
  add_common(pre, c, true);
  pre->add_option("--in", in, "Input directory")->required();
  pre->add_flag("--emit-stages", emit_stages, "Also write intermediate stages");

  auto* deg = app.add_subcommand("degrade", "Apply seeded random distortions");
  add_common(deg, c, true);
  deg->add_option("--in", in, "Input directory")->required();

  auto* pat = app.add_subcommand("patches", "Extract degraded/residual patch pairs");
  add_common(pat, c, true);
  pat->add_option("--in", in, "Input directory of clean images")->required();
  pat->add_option("--count", patch_count, "Patches per image");
  pat->add_option("--size", patch_size, "Patch side");

  auto* aug = app.add_subcommand("augment", "Augment image/label pairs for one epoch");
  add_common(aug, c, false);
  aug->add_option("--in", in, "Directory of <n>.pgm / <n>.labels.pgm pairs")->required();
  aug->add_option("--epoch", epoch);

  auto* bal = app.add_subcommand("balance-weights", "Inverse-frequency class weights");
  add_common(bal, c, false);
  bal->add_option("--in", in, "Directory of label maps")->required();

  auto* spl = app.add_subcommand("split", "Seeded train/val/test split");
  add_common(spl, c, false);
  spl->add_option("--in", in, "Directory or JSON manifest")->required();
  spl->add_option("--ratios", ratios, "train,val,test");

  auto* fwd = app.add_subcommand("forward", "Run the segmentation network forward");
  add_common(fwd, c, false);
  fwd->add_option("--in", in, "Input directory")->required();
  fwd->add_option("--weights", weights, "Weights file (random when omitted)");
  fwd->add_option("--input-size", input_size);
  fwd->add_option("--width-divisor", divisor);

  auto* ev = app.add_subcommand("evaluate", "Score predicted label maps");
  add_common(ev, c, false);
  ev->add_option("--gt", gt)->required();
  ev->add_option("--pred", pred)->required();

  auto* cur = app.add_subcommand("curves", "Per-class ROC and PR sweeps");
  add_common(cur, c, false);
  cur->add_option("--gt", gt)->required();
  cur->add_option("--prob", prob, "Directory of <n>.prob.sipw files")->required();
  cur->add_option("--step", step);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    set_num_threads(c.jobs);
    if (*synth) return cmd_synth(c, count, ranges);
    if (*pre) return cmd_preprocess(c, in, emit_stages);
    if (*deg) return cmd_degrade(c, in);
    if (*pat) return cmd_patches(c, in, patch_count, patch_size);
    if (*aug) return cmd_augment(c, in, epoch);
    if (*bal) return cmd_balance(c, in);
    if (*spl) return cmd_split(c, in, ratios);
    if (*fwd) return cmd_forward(c, in, weights, input_size, divisor);
    if (*ev) return cmd_evaluate(c, gt, pred);
    if (*cur) return cmd_curves(c, gt, prob, step);
  } catch (const ConfigFailure& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitConfig;
}

}  // namespace sipseg::cli
