#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "cidlab/baseline.hpp"
#include "cidlab/lz77.hpp"

using namespace cidlab;

namespace {

// Regression constants frozen from the implementation's own seeded runs.
constexpr std::uint64_t kFrozenSeed = 20250809;
constexpr double kBaseline16 = 83292.830862;   // N = 2^16, K = 100
constexpr double kBaseline12 = 5495.491768;    // N = 2^12, K = 100
constexpr double kPeriod2Cid12 = 0.012236414016;

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("cidlab_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("baseline entries are deterministic and frozen") {
  auto e = ShuffleBaseline::compute_entry(1u << 16, 100, kFrozenSeed);
  CHECK(e.bits == doctest::Approx(kBaseline16).epsilon(1e-9));
  auto e12 = ShuffleBaseline::compute_entry(1u << 12, 100, kFrozenSeed);
  CHECK(e12.bits == doctest::Approx(kBaseline12).epsilon(1e-9));
  CHECK(ShuffleBaseline::compute_entry(1u << 12, 100, kFrozenSeed).bits == e12.bits);

  CHECK(ShuffleBaseline::compute_entry(1, 10, 3).bits == doctest::Approx(0.0));
  CHECK_THROWS(ShuffleBaseline::compute_entry(0, 10, 3));
  CHECK_THROWS(ShuffleBaseline::compute_entry(16, 0, 3));
}

TEST_CASE("baseline is monotone over the lengths we use") {
  ShuffleBaseline b;
  double prev = 0.0;
  for (std::size_t n : {16, 64, 256, 1024, 4096}) {
    b.add(n, 40, 7);
    CHECK(b.bits_for(n) > prev);
    prev = b.bits_for(n);
  }
}

TEST_CASE("cid of structured sequences") {
  ShuffleBaseline b;
  b.insert({1u << 16, 100, kFrozenSeed, kBaseline16});
  b.insert({1u << 12, 100, kFrozenSeed, kBaseline12});

  std::vector<std::int8_t> ones(1u << 16, 1);
  CHECK(lz77_code_length_bits(ones) == doctest::Approx(62.0).epsilon(1e-12));
  CHECK(cid(ones, b) < 1e-3);

  std::vector<std::int8_t> period2(1u << 12);
  for (std::size_t i = 0; i < period2.size(); ++i) period2[i] = i % 2 ? -1 : 1;
  CHECK(cid(period2, b) == doctest::Approx(kPeriod2Cid12).epsilon(1e-9));

  SUBCASE("fresh uniform sequences have unit mean cid") {
    std::mt19937_64 rng(555);
    double mean = 0.0;
    const int m = 40;
    for (int i = 0; i < m; ++i) {
      std::vector<std::int8_t> x(1u << 12);
      for (auto& v : x) v = rng() & 1 ? 1 : -1;
      mean += cid(x, b);
    }
    mean /= m;
    CHECK(std::abs(mean - 1.0) < 0.01);
  }

  SUBCASE("missing entries are reported") {
    std::vector<std::int8_t> x(100, 1);
    CHECK_THROWS(cid(x, b));
  }
}

TEST_CASE("baseline file round trip preserves bytes") {
  TempDir tmp;
  const std::string path = (tmp.path / "baseline.txt").string();
  ShuffleBaseline b;
  b.add(64, 25, 99);
  b.add(256, 25, 99);
  b.save(path);
  auto loaded = ShuffleBaseline::load(path);
  CHECK(loaded.bits_for(64) == b.bits_for(64));
  CHECK(loaded.bits_for(256) == b.bits_for(256));

  // identical rebuild gives identical file bytes
  const std::string path2 = (tmp.path / "baseline2.txt").string();
  ShuffleBaseline c;
  c.add(64, 25, 99);
  c.add(256, 25, 99);
  c.save(path2);
  std::ifstream f1(path), f2(path2);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
}
