#include <doctest.h>

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "helpers.hpp"
#include "sipseg/io.hpp"
#include "sipseg/synth.hpp"

using namespace sipseg;

namespace {

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

std::string pgm(int w, int h, const std::string& raster, const std::string& magic = "P5") {
  return magic + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n" + raster;
}

void write_png(const std::filesystem::path& p, int w, int h, int color_type, const std::vector<std::uint8_t>& data) {
  FILE* fp = std::fopen(p.c_str(), "wb");
  REQUIRE(fp);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  for (int y = 0; y < h; ++y) {
    png_write_row(png, const_cast<png_bytep>(data.data() + static_cast<std::size_t>(y) * w * channels));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("read_gray maps bytes to p/255") {
  testing::TempDir dir("io");
  write_bytes(dir / "zero.pgm", pgm(3, 2, std::string(6, '\0')));
  write_bytes(dir / "full.pgm", pgm(3, 2, std::string(6, '\xff')));
  write_bytes(dir / "mid.pgm", pgm(1, 1, std::string(1, '\x80')));
  const GrayImage zero = read_gray(dir / "zero.pgm");
  const GrayImage full = read_gray(dir / "full.pgm");
  for (double v : zero.pixels()) CHECK(v == 0.0);
  for (double v : full.pixels()) CHECK(v == 1.0);
  const GrayImage mid = read_gray(dir / "mid.pgm");
  CHECK(mid(0, 0) == 128.0 / 255.0);
  CHECK(mid(0, 0) == doctest::Approx(0.50196).epsilon(1e-5));
}

TEST_CASE("PGM header comments and dimensions") {
  testing::TempDir dir("io");
  write_bytes(dir / "c.pgm", "P5\n# made by hand\n2 1\n# another\n255\n\x01\x02");
  const GrayImage img = read_gray(dir / "c.pgm");
  CHECK(img.width() == 2);
  CHECK(img.height() == 1);
  CHECK(img(1, 0) == 2.0 / 255.0);
}

TEST_CASE("read_gray error codes are distinct") {
  testing::TempDir dir("io");
  CHECK(code_of([&] { read_gray(dir / "missing.pgm"); }) == ErrorCode::FileNotFound);
  write_bytes(dir / "junk.pgm", "hello world");
  CHECK(code_of([&] { read_gray(dir / "junk.pgm"); }) == ErrorCode::MalformedHeader);
  write_bytes(dir / "short.pgm", pgm(4, 4, "abc"));
  CHECK(code_of([&] { read_gray(dir / "short.pgm"); }) == ErrorCode::MalformedHeader);
  write_bytes(dir / "deep.pgm", "P5\n1 1\n65535\n\x00\x01");
  CHECK(code_of([&] { read_gray(dir / "deep.pgm"); }) == ErrorCode::MalformedHeader);
  write_bytes(dir / "color.ppm", pgm(1, 1, "abc", "P6"));
  CHECK(code_of([&] { read_gray(dir / "color.ppm"); }) == ErrorCode::NotGrayscale);
  write_png(dir / "rgb.png", 2, 2, PNG_COLOR_TYPE_RGB, std::vector<std::uint8_t>(12, 7));
  CHECK(code_of([&] { read_gray(dir / "rgb.png"); }) == ErrorCode::NotGrayscale);
}

TEST_CASE("grayscale PNG is read like PGM") {
  testing::TempDir dir("io");
  std::vector<std::uint8_t> data = {0, 64, 128, 255, 1, 2};
  write_png(dir / "g.png", 3, 2, PNG_COLOR_TYPE_GRAY, data);
  const GrayImage img = read_gray(dir / "g.png");
  REQUIRE(img.width() == 3);
  REQUIRE(img.height() == 2);
  for (std::size_t i = 0; i < data.size(); ++i) CHECK(img.pixels()[i] == data[i] / 255.0);
}

TEST_CASE("write_gray round trip reproduces quantize") {
  testing::TempDir dir("io");
  CHECK(quantize(0.5) == 128);
  CHECK(quantize(-0.2) == 0);
  CHECK(quantize(1.7) == 255);

  GrayImage half(5, 4, 0.5);
  write_gray(half, dir / "h.pgm");
  const GrayImage half_back = read_gray(dir / "h.pgm");
  for (double v : half_back.pixels()) CHECK(v == 128.0 / 255.0);

  GrayImage zero(5, 4, 0.0);
  write_gray(zero, dir / "z.pgm");
  CHECK(read_gray(dir / "z.pgm") == zero);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GrayImage img = testing::random_gray(17, 9, seed);
    write_gray(img, dir / "r.pgm");
    const GrayImage back = read_gray(dir / "r.pgm");
    for (std::size_t i = 0; i < img.size(); ++i) REQUIRE(back.pixels()[i] == quantize(img.pixels()[i]) / 255.0);
    // A second round trip is a fixed point.
    write_gray(back, dir / "r2.pgm");
    REQUIRE(read_gray(dir / "r2.pgm") == back);
  }
  CHECK(code_of([&] { write_gray(half, dir / "no" / "such" / "dir.pgm"); }) == ErrorCode::Unwritable);
}

TEST_CASE("label map I/O") {
  testing::TempDir dir("io");
  LabelMap zero(6, 3, 0);
  write_labels(zero, dir / "z.labels.pgm");
  CHECK(read_labels(dir / "z.labels.pgm") == zero);

  LabelMap checker(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) checker(x, y) = (x + y) % 2 ? 3 : 0;
  }
  write_labels(checker, dir / "c.labels.pgm");
  CHECK(read_labels(dir / "c.labels.pgm") == checker);

  write_bytes(dir / "bad.labels.pgm", pgm(2, 1, std::string("\x01\x07", 2)));
  CHECK(code_of([&] { read_labels(dir / "bad.labels.pgm"); }) == ErrorCode::ValueOutOfRange);

  LabelMap bad(1, 1, 9);
  CHECK(code_of([&] { write_labels(bad, dir / "x.pgm"); }) == ErrorCode::ValueOutOfRange);
}

TEST_CASE("plane construction and validity") {
  CHECK(code_of([] { GrayImage(0, 3); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { GrayImage(2, 2, std::vector<double>(3)); }) == ErrorCode::InvalidArgument);
  GrayImage img(2, 2, 0.5);
  CHECK(is_valid(img));
  img(1, 1) = 1.5;
  CHECK_FALSE(is_valid(img));
  img(1, 1) = std::nan("");
  CHECK_FALSE(is_valid(img));
  CHECK(img.clamped(-5, 9) == img(0, 1));
}

TEST_CASE("synthetic eye: noiseless levels and labels") {
  SyntheticEyeSpec spec;
  const SyntheticEye eye = render_synthetic_eye(spec, 1);
  REQUIRE(is_valid(eye.labels));
  for (std::size_t i = 0; i < eye.image.size(); ++i) {
    const int cls = eye.labels.pixels()[i];
    REQUIRE(eye.image.pixels()[i] == spec.level[cls]);
  }
  // Region membership by direct geometry.
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double dx = x - spec.pupil_x, dy = y - spec.pupil_y;
      const double r2 = dx * dx + dy * dy;
      const double e = dx * dx / (spec.sclera_axis_x * spec.sclera_axis_x) +
                       dy * dy / (spec.sclera_axis_y * spec.sclera_axis_y);
      const int expect = r2 <= spec.pupil_radius * spec.pupil_radius   ? 3
                         : r2 <= spec.iris_radius * spec.iris_radius ? 2
                         : e <= 1.0                                  ? 1
                                                                     : 0;
      REQUIRE(eye.labels(x, y) == expect);
    }
  }
}

TEST_CASE("synthetic eye: determinism, pupil area and noise") {
  SyntheticEyeSpec spec;
  spec.noise_variance = 0.004;
  spec.spots = {{84, 76, 2.5}};
  spec.eyelash_strokes = 8;
  const SyntheticEye a = render_synthetic_eye(spec, 42);
  const SyntheticEye b = render_synthetic_eye(spec, 42);
  CHECK(a.image == b.image);
  CHECK(a.labels == b.labels);
  CHECK_FALSE(render_synthetic_eye(spec, 43).image == a.image);
  CHECK(is_valid(a.image));
  CHECK(a.image(84, 76) == 1.0);

  for (double r : {10.0, 18.0, 25.5, 33.0}) {
    SyntheticEyeSpec s;
    s.pupil_radius = r;
    s.iris_radius = r + 8;
    s.sclera_axis_x = r + 30;
    s.sclera_axis_y = r + 20;
    const SyntheticEye eye = render_synthetic_eye(s, 0);
    std::size_t pupil = 0;
    for (auto v : eye.labels.pixels()) pupil += v == 3;
    CHECK(std::abs(static_cast<double>(pupil) - std::numbers::pi * r * r) <= 4 * r);
  }
}

TEST_CASE("synthetic eye: geometry validation") {
  SyntheticEyeSpec s;
  s.pupil_radius = 45;  // larger than the iris
  CHECK(code_of([&] { validate(s); }) == ErrorCode::GeometryOutOfBounds);
  s = SyntheticEyeSpec{};
  s.pupil_x = 20;  // sclera leaves the frame
  CHECK(code_of([&] { render_synthetic_eye(s, 0); }) == ErrorCode::GeometryOutOfBounds);
}

TEST_CASE("sampled eye specs are always valid") {
  SyntheticEyeRanges r;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const SyntheticEyeSpec s = sample_eye_spec(r, seed);
    REQUIRE_NOTHROW(validate(s));
    CHECK(s.pupil_radius >= r.pupil_radius_min);
    CHECK(s.pupil_radius <= r.pupil_radius_max);
    CHECK(s.level[2] - s.level[3] >= r.pupil_contrast_min - 1e-12);
    CHECK(s.noise_variance <= r.noise_variance_max);
  }
}
