#include "sipseg/io.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace sipseg {
namespace {

struct RawImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bytes;
};

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::FileNotFound, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Reads one whitespace-delimited header token, skipping '#' comments.
bool next_token(const std::vector<std::uint8_t>& buf, std::size_t& pos, std::string& tok) {
  tok.clear();
  while (pos < buf.size()) {
    const auto c = buf[pos];
    if (c == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(c)) {
      ++pos;
    } else {
      break;
    }
  }
  while (pos < buf.size() && !std::isspace(buf[pos]) && buf[pos] != '#') {
    tok.push_back(static_cast<char>(buf[pos++]));
  }
  return !tok.empty();
}

int parse_dim(const std::string& tok, const std::filesystem::path& path) {
  if (tok.empty() || tok.size() > 9 ||
      !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(c); })) {
    fail(ErrorCode::MalformedHeader, "bad header field '" + tok + "' in " + path.string());
  }
  return std::stoi(tok);
}

RawImage decode_pgm(const std::vector<std::uint8_t>& buf, const std::filesystem::path& path) {
  std::size_t pos = 0;
  std::string magic;
  if (!next_token(buf, pos, magic)) fail(ErrorCode::MalformedHeader, "empty file " + path.string());
  if (magic == "P6" || magic == "P3") {
    fail(ErrorCode::NotGrayscale, path.string() + " is a color PPM");
  }
  if (magic != "P5") fail(ErrorCode::MalformedHeader, "unsupported magic " + magic);
  std::string tw, th, tm;
  if (!next_token(buf, pos, tw) || !next_token(buf, pos, th) || !next_token(buf, pos, tm)) {
    fail(ErrorCode::MalformedHeader, "truncated PGM header in " + path.string());
  }
  RawImage raw;
  raw.width = parse_dim(tw, path);
  raw.height = parse_dim(th, path);
  const int maxval = parse_dim(tm, path);
  if (raw.width < 1 || raw.height < 1) fail(ErrorCode::MalformedHeader, "zero-sized PGM");
  if (maxval != 255) {
    fail(ErrorCode::MalformedHeader, "only 8-bit PGM (maxval 255) is supported, got " + tm);
  }
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= buf.size() || !std::isspace(buf[pos])) {
    fail(ErrorCode::MalformedHeader, "missing raster separator in " + path.string());
  }
  ++pos;
  const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height;
  if (buf.size() - pos < n) fail(ErrorCode::MalformedHeader, "truncated raster in " + path.string());
  raw.bytes.assign(buf.begin() + static_cast<std::ptrdiff_t>(pos),
                   buf.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return raw;
}

RawImage decode_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!fp) fail(ErrorCode::FileNotFound, "cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::MalformedHeader, "libpng initialisation failed");
  }
  RawImage raw;
  std::string error;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::MalformedHeader, "corrupt PNG " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_GRAY_ALPHA) {
    error = path.string() + " is not a grayscale PNG";
  } else if (depth > 8) {
    error = path.string() + " has " + std::to_string(depth) + "-bit samples; only 8-bit is supported";
  }
  if (!error.empty()) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::NotGrayscale, error);
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  raw.width = static_cast<int>(png_get_image_width(png, info));
  raw.height = static_cast<int>(png_get_image_height(png, info));
  raw.bytes.resize(static_cast<std::size_t>(raw.width) * raw.height);
  std::vector<png_bytep> rows(raw.height);
  for (int y = 0; y < raw.height; ++y) rows[y] = raw.bytes.data() + static_cast<std::size_t>(y) * raw.width;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  return raw;
}

RawImage read_raw(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::FileNotFound, "no such file " + path.string());
  auto buf = slurp(path);
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (buf.size() >= 8 && std::equal(kPngSig, kPngSig + 8, buf.begin())) return decode_png(path);
  return decode_pgm(buf, path);
}

void write_raw(int width, int height, std::span<const std::uint8_t> bytes,
               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Unwritable, "cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Unwritable, "write failed for " + path.string());
}

}  // namespace

std::uint8_t quantize(double v) {
  const double q = std::round(v * 255.0);
  return static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
}

GrayImage read_gray(const std::filesystem::path& path) {
  const RawImage raw = read_raw(path);
  std::vector<double> px(raw.bytes.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = raw.bytes[i] / 255.0;
  return GrayImage(raw.width, raw.height, std::move(px));
}

void write_gray(const GrayImage& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(img.size());
  auto src = img.pixels();
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = quantize(src[i]);
  write_raw(img.width(), img.height(), bytes, path);
}

LabelMap read_labels(const std::filesystem::path& path) {
  RawImage raw = read_raw(path);
  for (std::size_t i = 0; i < raw.bytes.size(); ++i) {
    if (raw.bytes[i] >= kNumClasses) {
      fail(ErrorCode::ValueOutOfRange, path.string() + ": label " + std::to_string(raw.bytes[i]) +
                                           " at pixel " + std::to_string(i) + " is outside 0..3");
    }
  }
  return LabelMap(raw.width, raw.height, std::move(raw.bytes));
}

void write_labels(const LabelMap& labels, const std::filesystem::path& path) {
  if (!is_valid(labels)) fail(ErrorCode::ValueOutOfRange, "label map holds ids outside 0..3");
  write_raw(labels.width(), labels.height(), labels.pixels(), path);
}

void write_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(mask.size());
  auto src = mask.pixels();
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = src[i] ? 255 : 0;
  write_raw(mask.width(), mask.height(), bytes, path);
}

}  // namespace sipseg
