#pragma once

#include <cstdint>
#include <random>

namespace cidlab {

/// splitmix64 step, used to derive independent seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic sub-stream seed from (master, a, b, c).  Used so that chain
/// and task streams do not depend on thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = master;
  splitmix64(s);
  s ^= 0x1234567f0e1d2c3bULL + a;
  splitmix64(s);
  s ^= 0x9e6c63d1a37b52efULL + b;
  splitmix64(s);
  s ^= 0x452821e638d01377ULL + c;
  return splitmix64(s);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace cidlab
