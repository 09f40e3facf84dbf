#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cidlab {

/// One LZ77 tuple (d, l, b): copy l symbols from d positions back, then emit
/// the literal b.  b == 0 stands for "no following symbol" and may appear
/// only in the final tuple of a sequence.
struct LzTuple {
  std::uint32_t distance = 0;
  std::uint32_t length = 0;
  std::int8_t next = 0;  // +1, -1, or 0 for none

  bool operator==(const LzTuple&) const = default;
};

struct CompressedSeq {
  std::vector<LzTuple> tuples;
  std::size_t source_length = 0;
};

/// Greedy longest-match LZ77 with an unbounded window.  Matches may overlap
/// the current position (length may exceed distance); ties are broken by the
/// smallest distance.
CompressedSeq lz77_compress(std::span<const std::int8_t> x);

/// Exact inverse of lz77_compress on its image.  Copies proceed symbol by
/// symbol, so self-referencing tuples are legal.  Throws on malformed input.
std::vector<std::int8_t> lz77_decompress(const CompressedSeq& c);

/// Code-length estimate in bits: |C| log2|C| + 2|C| log2(N/|C|).
double lz77_code_length_bits(const CompressedSeq& c);

/// Convenience: code length of the compressed input.
double lz77_code_length_bits(std::span<const std::int8_t> x);

}  // namespace cidlab
