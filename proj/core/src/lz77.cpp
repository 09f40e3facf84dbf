#include "cidlab/lz77.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace cidlab {

namespace {

constexpr std::uint32_t kNoPos = 0xffffffffu;

// Hash chains over k-grams for k = 8, 4, 2, newest position first, so a
// newest-first scan yields the smallest distance among equal-length matches.
struct ChainLevel {
  int k;
  std::vector<std::uint32_t> head;   // 2^k entries, gram value -> newest pos
  std::vector<std::uint32_t> prev;   // pos -> previous pos with same gram

  ChainLevel(int k_, std::size_t n) : k(k_), head(std::size_t(1) << k_, kNoPos), prev(n, kNoPos) {}
};

inline std::uint32_t gram_at(std::span<const std::int8_t> x, std::size_t i, int k) {
  std::uint32_t g = 0;
  for (int t = 0; t < k; ++t) g = (g << 1) | (x[i + t] > 0 ? 1u : 0u);
  return g;
}

inline std::size_t extend_match(std::span<const std::int8_t> x, std::size_t j, std::size_t i) {
  std::size_t n = x.size(), t = 0;
  while (i + t < n && x[j + t] == x[i + t]) ++t;
  return t;
}

}  // namespace

CompressedSeq lz77_compress(std::span<const std::int8_t> x) {
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("lz77_compress: empty input");

  std::array<ChainLevel, 3> levels{ChainLevel(8, n), ChainLevel(4, n), ChainLevel(2, n)};
  std::array<std::uint32_t, 2> last_pos{kNoPos, kNoPos};  // per symbol, newest occurrence

  auto insert_pos = [&](std::size_t i) {
    for (auto& lv : levels)
      if (i + lv.k <= n) {
        std::uint32_t g = gram_at(x, i, lv.k);
        lv.prev[i] = lv.head[g];
        lv.head[g] = static_cast<std::uint32_t>(i);
      }
    last_pos[x[i] > 0 ? 1 : 0] = static_cast<std::uint32_t>(i);
  };

  CompressedSeq out;
  out.source_length = n;
  std::size_t i = 0;
  while (i < n) {
    const std::size_t remaining = n - i;
    std::size_t best_len = 0, best_pos = 0;

    for (auto& lv : levels) {
      if (best_len >= static_cast<std::size_t>(lv.k)) break;  // longer gram level already decided
      if (remaining < static_cast<std::size_t>(lv.k)) continue;
      std::uint32_t g = gram_at(x, i, lv.k);
      for (std::uint32_t j = lv.head[g]; j != kNoPos; j = lv.prev[j]) {
        std::size_t len = extend_match(x, j, i);
        if (len > best_len) {
          best_len = len;
          best_pos = j;
          if (best_len == remaining) break;
        }
      }
      if (best_len == remaining) break;
    }
    if (best_len == 0) {
      std::uint32_t j = last_pos[x[i] > 0 ? 1 : 0];
      if (j != kNoPos) {
        best_len = 1;
        best_pos = j;
      }
    }

    LzTuple t;
    if (best_len == 0) {
      t = LzTuple{0, 0, x[i]};
    } else {
      t.distance = static_cast<std::uint32_t>(i - best_pos);
      t.length = static_cast<std::uint32_t>(best_len);
      t.next = (i + best_len < n) ? x[i + best_len] : std::int8_t(0);
    }
    std::size_t consumed = best_len + (t.next != 0 ? 1 : 0);
    for (std::size_t k = 0; k < consumed; ++k) insert_pos(i + k);
    i += consumed;
    out.tuples.push_back(t);
  }
  return out;
}

std::vector<std::int8_t> lz77_decompress(const CompressedSeq& c) {
  std::vector<std::int8_t> out;
  out.reserve(c.source_length);
  for (std::size_t ti = 0; ti < c.tuples.size(); ++ti) {
    const LzTuple& t = c.tuples[ti];
    if (t.distance == 0) {
      if (t.length != 0) throw std::invalid_argument("lz77_decompress: d=0 requires l=0");
      if (t.next == 0) throw std::invalid_argument("lz77_decompress: d=0 requires a literal");
    } else {
      if (t.distance > out.size())
        throw std::invalid_argument("lz77_decompress: distance exceeds decoded length");
      for (std::uint32_t k = 0; k < t.length; ++k)
        out.push_back(out[out.size() - t.distance]);
    }
    if (t.next != 0)
      out.push_back(t.next);
    else if (ti + 1 != c.tuples.size())
      throw std::invalid_argument("lz77_decompress: terminal tuple before end of sequence");
  }
  if (out.size() != c.source_length)
    throw std::invalid_argument("lz77_decompress: decoded length mismatch");
  return out;
}

double lz77_code_length_bits(const CompressedSeq& c) {
  const double m = static_cast<double>(c.tuples.size());
  const double n = static_cast<double>(c.source_length);
  if (m < 1.0 || n < m) throw std::invalid_argument("lz77_code_length_bits: invalid sizes");
  return m * std::log2(m) + 2.0 * m * std::log2(n / m);
}

double lz77_code_length_bits(std::span<const std::int8_t> x) {
  return lz77_code_length_bits(lz77_compress(x));
}

}  // namespace cidlab
