#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sipseg/enhance.hpp"
#include "sipseg/periocular.hpp"
#include "sipseg/restore.hpp"

namespace sipseg {

enum class Denoiser { Identity, Nlm };

struct PipelineConfig {
  Denoiser denoiser = Denoiser::Identity;
  NlmConfig denoise_nlm{3.0 / 255.0, 7, 3, 0.0};
  double stretch_tail = 0.01;
  double contrast_exponent = 3.0;
  ClaheConfig clahe;
  ReflectionConfig reflection;
  NlmConfig nlm;
  PeriocularConfig periocular;
  AtmedConfig atmed;
};

/// Reads every stage parameter from a JSON object. Unknown keys and
/// out-of-range values raise ConfigError.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& cfg);

struct PipelineResult {
  GrayImage denoised;        // D
  GrayImage enhanced;        // E
  BinaryMask holes;          // dilated reflection holes
  GrayImage filtered;        // F
  BinaryMask periocular_raw; // P' (pupil still present)
  BinaryMask periocular;     // P
  GrayImage fuzzified;       // fuzzy-filtered F
  GrayImage preprocessed;    // final output
  std::optional<PupilCircle> pupil;
  std::string warning;
};

PipelineResult preprocess_pipeline(const GrayImage& x, const PipelineConfig& cfg = {});

}  // namespace sipseg
