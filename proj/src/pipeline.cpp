#include "sipseg/pipeline.hpp"

#include <set>

namespace sipseg {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::ConfigError, what); }

// Reads `obj[key]` into `out` when present; rejects keys outside `allowed`.
class Section {
 public:
  Section(const json& j, std::string name, std::set<std::string> allowed)
      : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) config_error("section '" + name_ + "' must be an object");
    for (const auto& [key, _] : j_.items()) {
      if (!allowed.count(key)) config_error("unknown key '" + name_ + "." + key + "'");
    }
  }

  template <typename T>
  void get(const char* key, T& out) const {
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      config_error("bad value for '" + name_ + "." + key + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
};

void check(bool ok, const std::string& what) {
  if (!ok) config_error(what);
}

NlmConfig read_nlm(const json& j, const std::string& name, NlmConfig cfg) {
  Section s(j, name, {"h", "search", "comparison", "noise_variance"});
  s.get("h", cfg.h);
  s.get("search", cfg.search);
  s.get("comparison", cfg.comparison);
  s.get("noise_variance", cfg.noise_variance);
  try {
    validate(cfg);
  } catch (const Error& e) {
    config_error(name + ": " + e.what());
  }
  return cfg;
}

json nlm_json(const NlmConfig& c) {
  return {{"h", c.h}, {"search", c.search}, {"comparison", c.comparison}, {"noise_variance", c.noise_variance}};
}

}  // namespace

PipelineConfig pipeline_config_from_json(const json& j) {
  PipelineConfig cfg;
  Section top(j, "config",
              {"denoise", "stretch", "contrast", "clahe", "reflection", "nlm", "threshold", "dio", "atmed"});
  if (j.contains("denoise")) {
    Section s(j["denoise"], "denoise", {"method", "nlm"});
    std::string method = "identity";
    s.get("method", method);
    if (method == "identity") {
      cfg.denoiser = Denoiser::Identity;
    } else if (method == "nlm") {
      cfg.denoiser = Denoiser::Nlm;
    } else {
      config_error("denoise.method must be 'identity' or 'nlm'");
    }
    if (j["denoise"].contains("nlm")) cfg.denoise_nlm = read_nlm(j["denoise"]["nlm"], "denoise.nlm", cfg.denoise_nlm);
  }
  if (j.contains("stretch")) {
    Section s(j["stretch"], "stretch", {"tail"});
    s.get("tail", cfg.stretch_tail);
    check(cfg.stretch_tail >= 0 && cfg.stretch_tail < 0.5, "stretch.tail must lie in [0,0.5)");
  }
  if (j.contains("contrast")) {
    Section s(j["contrast"], "contrast", {"E"});
    s.get("E", cfg.contrast_exponent);
    check(cfg.contrast_exponent > 0, "contrast.E must be positive");
  }
  if (j.contains("clahe")) {
    Section s(j["clahe"], "clahe", {"tile", "clip"});
    s.get("tile", cfg.clahe.tile);
    s.get("clip", cfg.clahe.clip_limit);
    check(cfg.clahe.tile >= 2, "clahe.tile must be >= 2");
    check(cfg.clahe.clip_limit > 0 && cfg.clahe.clip_limit <= 1, "clahe.clip must lie in (0,1]");
  }
  if (j.contains("reflection")) {
    Section s(j["reflection"], "reflection", {"sensitivity", "dilate_radius", "window", "lambda"});
    s.get("sensitivity", cfg.reflection.sensitivity);
    s.get("dilate_radius", cfg.reflection.dilate_radius);
    s.get("window", cfg.reflection.window);
    s.get("lambda", cfg.reflection.lambda);
    check(cfg.reflection.sensitivity >= 0 && cfg.reflection.sensitivity <= 1,
          "reflection.sensitivity must lie in [0,1]");
    check(cfg.reflection.dilate_radius >= 0, "reflection.dilate_radius must be >= 0");
    check(cfg.reflection.window == 0 || (cfg.reflection.window >= 3 && cfg.reflection.window % 2 == 1),
          "reflection.window must be 0 or odd >= 3");
  }
  if (j.contains("nlm")) cfg.nlm = read_nlm(j["nlm"], "nlm", cfg.nlm);
  if (j.contains("threshold")) {
    auto& t = cfg.periocular.threshold;
    Section s(j["threshold"], "threshold", {"sensitivity", "window", "lambda"});
    s.get("sensitivity", t.sensitivity);
    s.get("window", t.window);
    s.get("lambda", t.lambda);
    check(t.sensitivity >= 0 && t.sensitivity <= 1, "threshold.sensitivity must lie in [0,1]");
    check(t.window == 0 || (t.window >= 3 && t.window % 2 == 1), "threshold.window must be 0 or odd >= 3");
  }
  if (j.contains("dio")) {
    auto& d = cfg.periocular.dio;
    Section s(j["dio"], "dio",
              {"r_min", "r_max", "sigma", "samples", "coarse_stride", "refine_half", "response_floor",
               "pupil_margin"});
    s.get("r_min", d.r_min);
    s.get("r_max", d.r_max);
    s.get("sigma", d.sigma);
    s.get("samples", d.samples);
    s.get("coarse_stride", d.coarse_stride);
    s.get("refine_half", d.refine_half);
    s.get("response_floor", d.response_floor);
    s.get("pupil_margin", cfg.periocular.pupil_margin);
    check(cfg.periocular.pupil_margin >= 0, "dio.pupil_margin must be >= 0");
    check(d.r_min >= 1, "dio.r_min must be >= 1");
    check(d.r_max == 0 || d.r_max > d.r_min, "dio.r_max must be 0 or exceed dio.r_min");
    check(d.samples >= 8 && d.coarse_stride >= 1 && d.refine_half >= 0, "bad dio search grid");
  }
  if (j.contains("atmed")) {
    Section s(j["atmed"], "atmed", {"ws"});
    s.get("ws", cfg.atmed.window);
    check(cfg.atmed.window >= 1 && cfg.atmed.window % 2 == 1, "atmed.ws must be odd");
  }
  return cfg;
}

json to_json(const PipelineConfig& c) {
  const auto& t = c.periocular.threshold;
  const auto& d = c.periocular.dio;
  return {
      {"denoise", {{"method", c.denoiser == Denoiser::Nlm ? "nlm" : "identity"}, {"nlm", nlm_json(c.denoise_nlm)}}},
      {"stretch", {{"tail", c.stretch_tail}}},
      {"contrast", {{"E", c.contrast_exponent}}},
      {"clahe", {{"tile", c.clahe.tile}, {"clip", c.clahe.clip_limit}}},
      {"reflection",
       {{"sensitivity", c.reflection.sensitivity},
        {"dilate_radius", c.reflection.dilate_radius},
        {"window", c.reflection.window},
        {"lambda", c.reflection.lambda}}},
      {"nlm", nlm_json(c.nlm)},
      {"threshold", {{"sensitivity", t.sensitivity}, {"window", t.window}, {"lambda", t.lambda}}},
      {"dio",
       {{"r_min", d.r_min},
        {"r_max", d.r_max},
        {"sigma", d.sigma},
        {"samples", d.samples},
        {"coarse_stride", d.coarse_stride},
        {"refine_half", d.refine_half},
        {"response_floor", d.response_floor},
        {"pupil_margin", c.periocular.pupil_margin}}},
      {"atmed", {{"ws", c.atmed.window}}},
  };
}

PipelineResult preprocess_pipeline(const GrayImage& x, const PipelineConfig& cfg) {
  PipelineResult r;

  // 1: denoise slot, then linear stretch and contrast stretching.
  GrayImage d1 = cfg.denoiser == Denoiser::Nlm ? nlm_filter(x, cfg.denoise_nlm) : x;
  try {
    d1 = linear_map(d1, stretch_limits(d1, cfg.stretch_tail));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateInput) throw;
  }
  r.denoised = contrast_stretch(d1, cfg.contrast_exponent);

  // 2: global then contrast-limited adaptive equalization.
  r.enhanced = clahe(hist_equalize(r.denoised), cfg.clahe);

  // 3: ocular holes, then NLM over the whole image.
  ReflectionResult refl = remove_ocular_reflections(r.enhanced, cfg.reflection);
  r.holes = std::move(refl.holes);
  r.filtered = nlm_filter(refl.image, cfg.nlm);

  // 4: periocular components minus the located pupil.
  PeriocularResult peri = extract_periocular_mask(r.enhanced, cfg.periocular);
  r.periocular_raw = std::move(peri.with_pupil);
  r.periocular = std::move(peri.periocular);
  r.pupil = peri.pupil;
  r.warning = std::move(peri.warning);

  // 5: fuzzy filtering and replacement.
  r.fuzzified = atmed_filter(r.filtered, cfg.atmed);
  r.preprocessed = suppress_periocular(r.filtered, r.fuzzified, r.periocular);
  return r;
}

}  // namespace sipseg
