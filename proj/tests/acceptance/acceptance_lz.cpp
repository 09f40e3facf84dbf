#include <doctest.h>

#include <chrono>
#include <random>

#include "acceptance/support.hpp"
#include "cidlab/lz77.hpp"

using namespace cidlab;
using Clock = std::chrono::steady_clock;

TEST_CASE("criterion 01: LZ77 conformance") {
  const auto t0 = Clock::now();
  bool tuples_ok = true;

  auto expect = [&](std::initializer_list<int> xs, std::vector<LzTuple> want) {
    std::vector<std::int8_t> x;
    for (int v : xs) x.push_back(static_cast<std::int8_t>(v));
    auto got = lz77_compress(x).tuples;
    tuples_ok &= got.size() == want.size();
    for (std::size_t i = 0; tuples_ok && i < got.size(); ++i) tuples_ok &= got[i] == want[i];
  };
  expect({1, 1, 1, 1, 1, 1, 1, 1}, {{0, 0, 1}, {1, 7, 0}});
  expect({1, -1, 1, -1, 1, -1, 1, -1}, {{0, 0, 1}, {0, 0, -1}, {2, 6, 0}});
  expect({-1, -1, -1, -1, 1, 1, 1, -1}, {{0, 0, -1}, {1, 3, 1}, {1, 2, -1}});

  std::mt19937_64 rng(20240817);
  std::uniform_int_distribution<std::size_t> len(1, 4096);
  std::uniform_real_distribution<double> bias(0.02, 0.98);
  bool round_trip_ok = true;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<std::int8_t> x(len(rng));
    const double p = bias(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : x) v = u(rng) < p ? -1 : 1;
    round_trip_ok &= lz77_decompress(lz77_compress(x)) == x;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  acceptance::report(1, "LZ77 conformance", tuples_ok && round_trip_ok && secs < 10.0,
                     acceptance::fmt("worked examples %s, 10^4 round trips %s, %.1f s",
                                     tuples_ok ? "exact" : "WRONG",
                                     round_trip_ok ? "ok" : "FAILED", secs));
}

TEST_CASE("criterion 02: baseline normalization") {
  const auto t0 = Clock::now();
  const std::size_t n = 1u << 14;
  const auto& table = acceptance::baseline();
  std::mt19937_64 rng(987654321);  // fresh draws, independent of the baseline seed
  double mean = 0.0;
  const int reps = 200;
  std::vector<std::int8_t> x(n);
  for (int i = 0; i < reps; ++i) {
    for (auto& v : x) v = rng() & 1 ? 1 : -1;
    mean += cid(x, table);
  }
  mean /= reps;
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool pass = std::abs(mean - 1.0) <= 0.05 && secs < 30.0;
  acceptance::report(2, "baseline normalization",
                     pass, acceptance::fmt("mean CID = %.4f over %d fresh sequences, %.1f s",
                                           mean, reps, secs));
}
