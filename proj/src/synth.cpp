#include "sipseg/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace sipseg {

void validate(const SyntheticEyeSpec& s) {
  auto bad = [](const std::string& why) { fail(ErrorCode::GeometryOutOfBounds, why); };
  if (s.width < 1 || s.height < 1) bad("image dimensions must be positive");
  if (!(s.pupil_radius > 0 && s.pupil_radius < s.iris_radius)) bad("pupil radius must be in (0, iris radius)");
  if (!(s.iris_radius < std::min(s.sclera_axis_x, s.sclera_axis_y))) {
    bad("iris radius must be below both sclera axes");
  }
  if (s.pupil_x - s.sclera_axis_x < 0 || s.pupil_x + s.sclera_axis_x > s.width - 1 ||
      s.pupil_y - s.sclera_axis_y < 0 || s.pupil_y + s.sclera_axis_y > s.height - 1) {
    bad("sclera ellipse leaves the frame");
  }
  for (const auto& sp : s.spots) {
    if (sp.radius < 0 || sp.x < 0 || sp.y < 0 || sp.x > s.width - 1 || sp.y > s.height - 1) {
      bad("reflection spot outside the frame");
    }
  }
  for (double l : s.level) {
    if (!(l >= 0.0 && l <= 1.0)) fail(ErrorCode::InvalidArgument, "region levels must lie in [0,1]");
  }
  if (!(s.noise_variance >= 0.0)) fail(ErrorCode::InvalidArgument, "noise variance must be >= 0");
  if (s.eyelash_strokes < 0) fail(ErrorCode::InvalidArgument, "eyelash stroke count must be >= 0");
}

namespace {

EyeClass classify(const SyntheticEyeSpec& s, int x, int y) {
  const double dx = x - s.pupil_x;
  const double dy = y - s.pupil_y;
  const double r2 = dx * dx + dy * dy;
  if (r2 <= s.pupil_radius * s.pupil_radius) return EyeClass::Pupil;
  if (r2 <= s.iris_radius * s.iris_radius) return EyeClass::Iris;
  const double ex = dx / s.sclera_axis_x;
  const double ey = dy / s.sclera_axis_y;
  if (ex * ex + ey * ey <= 1.0) return EyeClass::Sclera;
  return EyeClass::Periocular;
}

// Dark 1-px strokes rooted on the upper ellipse boundary, drawn outward.
// They only touch periocular pixels, so the labels stay geometric.
void draw_eyelashes(const SyntheticEyeSpec& s, const LabelMap& labels, GrayImage& img,
                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.15 * std::numbers::pi, 0.85 * std::numbers::pi);
  std::uniform_real_distribution<double> length(6.0, 18.0);
  std::uniform_real_distribution<double> slant(-0.4, 0.4);
  for (int k = 0; k < s.eyelash_strokes; ++k) {
    const double a = angle(rng);
    const double x0 = s.pupil_x + s.sclera_axis_x * std::cos(a);
    const double y0 = s.pupil_y - s.sclera_axis_y * std::sin(a);
    const double dir = std::atan2(-std::sin(a), std::cos(a)) + slant(rng);
    const double len = length(rng);
    for (double t = 0; t <= len; t += 0.5) {
      const int x = static_cast<int>(std::lround(x0 + t * std::cos(dir)));
      const int y = static_cast<int>(std::lround(y0 + t * std::sin(dir)));
      if (x < 0 || y < 0 || x >= s.width || y >= s.height) break;
      if (labels(x, y) == static_cast<std::uint8_t>(EyeClass::Periocular)) img(x, y) = s.eyelash_level;
    }
  }
}

}  // namespace

SyntheticEye render_synthetic_eye(const SyntheticEyeSpec& s, std::uint64_t seed) {
  validate(s);
  SyntheticEye eye{GrayImage(s.width, s.height), LabelMap(s.width, s.height)};
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      const auto c = classify(s, x, y);
      eye.labels(x, y) = static_cast<std::uint8_t>(c);
      eye.image(x, y) = s.level[static_cast<int>(c)];
    }
  }
  std::mt19937_64 rng(seed);
  draw_eyelashes(s, eye.labels, eye.image, rng);
  if (s.noise_variance > 0) {
    std::normal_distribution<double> noise(0.0, std::sqrt(s.noise_variance));
    for (double& v : eye.image.pixels()) v += noise(rng);
  }
  for (const auto& sp : s.spots) {
    const int x0 = static_cast<int>(std::floor(sp.x - sp.radius));
    const int x1 = static_cast<int>(std::ceil(sp.x + sp.radius));
    const int y0 = static_cast<int>(std::floor(sp.y - sp.radius));
    const int y1 = static_cast<int>(std::ceil(sp.y + sp.radius));
    for (int y = std::max(0, y0); y <= std::min(s.height - 1, y1); ++y) {
      for (int x = std::max(0, x0); x <= std::min(s.width - 1, x1); ++x) {
        const double dx = x - sp.x, dy = y - sp.y;
        if (dx * dx + dy * dy <= sp.radius * sp.radius) eye.image(x, y) = 1.0;
      }
    }
  }
  for (double& v : eye.image.pixels()) v = std::clamp(v, 0.0, 1.0);
  return eye;
}

SyntheticEyeSpec sample_eye_spec(const SyntheticEyeRanges& r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  SyntheticEyeSpec s;
  s.width = r.width;
  s.height = r.height;
  const double half_min = 0.5 * (std::min(r.width, r.height) - 1);
  s.pupil_x = 0.5 * (r.width - 1) + uni(-4.0, 4.0);
  s.pupil_y = 0.5 * (r.height - 1) + uni(-4.0, 4.0);
  const double margin_x = std::min(s.pupil_x, r.width - 1 - s.pupil_x);
  const double margin_y = std::min(s.pupil_y, r.height - 1 - s.pupil_y);

  const double max_sclera_y = std::min(margin_y, half_min) - 1.0;
  const double pupil_hi = std::min(r.pupil_radius_max, max_sclera_y - 14.0);
  s.pupil_radius = uni(std::min(r.pupil_radius_min, pupil_hi), pupil_hi);
  s.iris_radius = std::min(s.pupil_radius + uni(8.0, 20.0), max_sclera_y - 4.0);
  s.sclera_axis_y = std::min(s.iris_radius + uni(3.0, 10.0), max_sclera_y);
  s.sclera_axis_x = std::min(s.sclera_axis_y + uni(8.0, 25.0), margin_x - 1.0);

  const double pupil = uni(0.03, 0.12);
  const double contrast = uni(r.pupil_contrast_min, std::max(r.pupil_contrast_min, 0.45));
  s.level[static_cast<int>(EyeClass::Pupil)] = pupil;
  s.level[static_cast<int>(EyeClass::Iris)] = pupil + contrast;
  s.level[static_cast<int>(EyeClass::Sclera)] = std::min(0.95, pupil + contrast + uni(0.1, 0.2));
  s.level[static_cast<int>(EyeClass::Periocular)] = uni(0.45, 0.65);
  s.noise_variance = uni(0.0, r.noise_variance_max);

  const int spots = std::uniform_int_distribution<int>(0, r.max_spots)(rng);
  for (int k = 0; k < spots; ++k) {
    const double a = uni(0.0, 2.0 * std::numbers::pi);
    const double rad = uni(0.0, 0.6) * s.pupil_radius;
    s.spots.push_back({s.pupil_x + rad * std::cos(a), s.pupil_y + rad * std::sin(a), uni(1.5, 3.0)});
  }
  s.eyelash_strokes = std::uniform_int_distribution<int>(0, r.max_eyelash_strokes)(rng);
  return s;
}

}  // namespace sipseg
