#include <doctest.h>

#include <fstream>
#include <set>
#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "sipseg/cli.hpp"
#include "sipseg/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using sipseg::cli::run;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

json read(const fs::path& p) { return json::parse(slurp(p)); }

std::size_t count_files(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.is_regular_file();
  return n;
}

json without_timing(json m) {
  for (auto& e : m["entries"]) e.erase("elapsed_ms");
  return m;
}

}  // namespace

TEST_CASE("synth writes an image and a label map per eye") {
  testing::TempDir d("cli_synth");
  CHECK(run({"synth", "--count", "5", "--out", (d / "eyes").string(), "--seed", "3"}) == sipseg::cli::kExitOk);
  CHECK(count_files(d / "eyes") == 10);
  CHECK(fs::exists(d / "eyes" / "0.labels.pgm"));
  CHECK(sipseg::is_valid(sipseg::read_labels(d / "eyes" / "4.labels.pgm")));
}

TEST_CASE("preprocess reports input and config failures") {
  testing::TempDir d("cli_pre_err");
  fs::create_directories(d / "empty");
  CHECK(run({"preprocess", "--in", (d / "empty").string(), "--out", (d / "o").string()}) == sipseg::cli::kExitInput);
  CHECK(run({"preprocess", "--in", (d / "missing").string(), "--out", (d / "o").string()}) ==
        sipseg::cli::kExitInput);

  REQUIRE(run({"synth", "--count", "1", "--out", (d / "one").string()}) == 0);
  std::ofstream(d / "bad.json") << R"({"clahe": {"tile": 20, "clip": 0.005, "bogus": 1}})";
  CHECK(run({"preprocess", "--in", (d / "one").string(), "--out", (d / "o").string(), "--config",
             (d / "bad.json").string()}) == sipseg::cli::kExitConfig);
  std::ofstream(d / "range.json") << R"({"nlm": {"search": 4}})";
  CHECK(run({"preprocess", "--in", (d / "one").string(), "--out", (d / "o").string(), "--config",
             (d / "range.json").string()}) == sipseg::cli::kExitConfig);
  std::ofstream(d / "broken.json") << "{";
  CHECK(run({"preprocess", "--in", (d / "one").string(), "--out", (d / "o").string(), "--config",
             (d / "broken.json").string()}) == sipseg::cli::kExitConfig);
  CHECK(run({"nonsense"}) != 0);
}

TEST_CASE("preprocess is deterministic over a directory") {
  testing::TempDir d("cli_pre");
  REQUIRE(run({"synth", "--count", "10", "--out", (d / "eyes").string(), "--seed", "1"}) == 0);
  REQUIRE(run({"preprocess", "--in", (d / "eyes").string(), "--out", (d / "a").string()}) == 0);
  REQUIRE(run({"preprocess", "--in", (d / "eyes").string(), "--out", (d / "b").string(), "--jobs", "1"}) == 0);
  const json ma = read(d / "a" / "manifest.json"), mb = read(d / "b" / "manifest.json");
  CHECK(ma["entries"].size() == 10);
  CHECK(ma["failures"].empty());
  for (const auto& e : ma["entries"]) CHECK(e.contains("elapsed_ms"));
  CHECK(without_timing(ma) == without_timing(mb));
  for (int i = 0; i < 10; ++i) {
    const std::string name = std::to_string(i) + ".pgm";
    REQUIRE(fs::exists(d / "a" / name));
    CHECK(slurp(d / "a" / name) == slurp(d / "b" / name));
  }
}

TEST_CASE("evaluate compares matching label sets") {
  testing::TempDir d("cli_eval");
  REQUIRE(run({"synth", "--count", "3", "--out", (d / "gt").string()}) == 0);
  REQUIRE(run({"evaluate", "--gt", (d / "gt").string(), "--pred", (d / "gt").string(), "--out",
               (d / "r.json").string()}) == 0);
  const json r = read(d / "r.json");
  CHECK(r["aggregate"]["MIoU"] == 1.0);
  CHECK(r["aggregate"]["Nice1"] == 0.0);
  CHECK(r["meta"]["images"] == 3);

  REQUIRE(run({"synth", "--count", "2", "--out", (d / "short").string()}) == 0);
  CHECK(run({"evaluate", "--gt", (d / "gt").string(), "--pred", (d / "short").string(), "--out",
             (d / "r2.json").string()}) == sipseg::cli::kExitInput);
}

TEST_CASE("split is seeded and honours the ratios") {
  testing::TempDir d("cli_split");
  REQUIRE(run({"synth", "--count", "10", "--out", (d / "eyes").string()}) == 0);
  REQUIRE(run({"split", "--in", (d / "eyes").string(), "--out", (d / "s").string(), "--seed", "5"}) == 0);
  const json s = read(d / "s" / "split.json");
  CHECK(s["sizes"] == json::array({6, 2, 2}));
  std::set<std::string> all;
  for (const char* k : {"train", "val", "test"}) {
    const json part = read(d / "s" / (std::string(k) + ".json"));
    for (const auto& v : part["items"]) all.insert(v.get<std::string>());
  }
  CHECK(all.size() == 10);
  REQUIRE(run({"split", "--in", (d / "eyes").string(), "--out", (d / "t").string(), "--seed", "5"}) == 0);
  CHECK(slurp(d / "s" / "train.json") == slurp(d / "t" / "train.json"));

  REQUIRE(run({"split", "--in", (d / "eyes").string(), "--out", (d / "u").string(), "--ratios", "1,0,0"}) == 0);
  CHECK(read(d / "u" / "split.json")["sizes"] == json::array({10, 0, 0}));
  CHECK(run({"split", "--in", (d / "eyes").string(), "--out", (d / "v").string(), "--ratios", "0.5,0.2,0.2"}) ==
        sipseg::cli::kExitConfig);
}

TEST_CASE("degrade, patches, augment, balance-weights") {
  testing::TempDir d("cli_misc");
  REQUIRE(run({"synth", "--count", "2", "--out", (d / "eyes").string()}) == 0);
  CHECK(run({"degrade", "--in", (d / "eyes").string(), "--out", (d / "deg").string()}) == 0);
  CHECK(fs::exists(d / "deg" / "0.pgm"));
  CHECK(run({"patches", "--in", (d / "eyes").string(), "--out", (d / "pat").string(), "--count", "4"}) == 0);
  CHECK(fs::exists(d / "pat" / "0.3.residual.pgm"));
  CHECK(run({"augment", "--in", (d / "eyes").string(), "--out", (d / "aug").string(), "--epoch", "2"}) == 0);
  CHECK(fs::exists(d / "aug" / "1.labels.pgm"));
  REQUIRE(run({"balance-weights", "--in", (d / "eyes").string(), "--out", (d / "w.json").string()}) == 0);
  const json w = read(d / "w.json");
  CHECK(w["images"] == 2);
  CHECK(w["classes"]["pupil"]["pixels"].get<std::uint64_t>() > 0);
}

TEST_CASE("forward and curves") {
  testing::TempDir d("cli_fwd");
  REQUIRE(run({"synth", "--count", "2", "--out", (d / "eyes").string()}) == 0);
  REQUIRE(run({"forward", "--in", (d / "eyes").string(), "--out", (d / "f").string(), "--input-size", "64",
               "--width-divisor", "16"}) == 0);
  CHECK(fs::exists(d / "f" / "0.labels.pgm"));
  REQUIRE(fs::exists(d / "f" / "0.prob.sipw"));
  REQUIRE(run({"curves", "--gt", (d / "eyes").string(), "--prob", (d / "f").string(), "--out",
               (d / "c").string()}) == 0);
  const json c = read(d / "c" / "curves.json");
  CHECK(c["classes"].contains("pupil"));
  CHECK(c["step"] == 0.003);
  CHECK(fs::exists(d / "c" / "iris.csv"));
  CHECK(run({"forward", "--in", (d / "eyes").string(), "--out", (d / "g").string(), "--input-size", "50"}) ==
        sipseg::cli::kExitConfig);
}
