#include "sipseg/net/weights_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace sipseg::net {
namespace {

static_assert(std::endian::native == std::endian::little, "weights I/O assumes a little-endian host");

template <typename T>
void put(std::string& buf, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.append(raw, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  template <typename T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }

  const char* take(std::size_t n) {
    if (data_.size() - pos_ < n) fail(ErrorCode::TruncatedFile, "weights file ends early");
    const char* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_tensors(const Weights& tensors, const std::filesystem::path& path) {
  std::string buf(kWeightsMagic, 4);
  put<std::uint16_t>(buf, kWeightsVersion);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    if (name.size() > 0xffff || t.rank() > 0xff) fail(ErrorCode::InvalidArgument, "tensor '" + name + "' cannot be stored");
    put<std::uint16_t>(buf, static_cast<std::uint16_t>(name.size()));
    buf += name;
    put<std::uint8_t>(buf, static_cast<std::uint8_t>(t.rank()));
    for (std::size_t d : t.shape()) put<std::uint32_t>(buf, static_cast<std::uint32_t>(d));
    for (double v : t.data()) put<float>(buf, static_cast<float>(v));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Unwritable, "cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(ErrorCode::Unwritable, "short write to " + path.string());
}

Weights load_tensors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::FileNotFound, "cannot open " + path.string());
  Reader r(std::string(std::istreambuf_iterator<char>(in), {}));
  if (std::memcmp(r.take(4), kWeightsMagic, 4) != 0) fail(ErrorCode::MagicMismatch, path.string() + " is not a weights file");
  const auto version = r.get<std::uint16_t>();
  if (version != kWeightsVersion) {
    fail(ErrorCode::MagicMismatch, "unsupported weights format version " + std::to_string(version));
  }
  const auto count = r.get<std::uint32_t>();
  Weights w;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.get<std::uint16_t>();
    std::string name(r.take(len), len);
    const auto rank = r.get<std::uint8_t>();
    Shape shape(rank);
    for (auto& d : shape) d = r.get<std::uint32_t>();
    const std::size_t n = element_count(shape);
    std::vector<double> data(n);
    for (double& v : data) v = r.get<float>();
    w.insert_or_assign(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  if (!r.done()) fail(ErrorCode::MalformedHeader, path.string() + " has trailing bytes");
  return w;
}

void save_weights(const NetworkSpec& net, const Weights& weights, const std::filesystem::path& path) {
  check_weights(net, weights);
  Weights used;
  for (const auto& [name, _] : parameter_shapes(net)) used.emplace(name, weights.at(name));
  save_tensors(used, path);
}

Weights load_weights(const NetworkSpec& net, const std::filesystem::path& path) {
  Weights w = load_tensors(path);
  check_weights(net, w);
  return w;
}

}  // namespace sipseg::net
