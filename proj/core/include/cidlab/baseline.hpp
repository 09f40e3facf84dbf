#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "cidlab/lattice.hpp"

namespace cidlab {

/// Mean LZ77 code length of uniform random +/-1 sequences, per length N.
/// Used as the denominator that normalizes CID to one for random input.
class ShuffleBaseline {
 public:
  struct Entry {
    std::size_t n = 0;
    int k = 0;             // number of averaged random sequences
    std::uint64_t seed = 0;
    double bits = 0.0;
  };

  /// Mean code length over k seeded uniform sequences of length n.
  static Entry compute_entry(std::size_t n, int k, std::uint64_t seed);

  void add(std::size_t n, int k, std::uint64_t seed);
  void insert(const Entry& e);
  bool has(std::size_t n) const { return entries_.count(n) != 0; }
  double bits_for(std::size_t n) const;  // throws if missing
  const std::map<std::size_t, Entry>& entries() const { return entries_; }

  // Text table persistence: one "N K seed bits" row per entry.
  void save(const std::string& path) const;
  static ShuffleBaseline load(const std::string& path);

 private:
  std::map<std::size_t, Entry> entries_;
};

/// Computable information density of a +/-1 sequence: code length divided by
/// the shuffle baseline at the same length.
double cid(std::span<const std::int8_t> seq, const ShuffleBaseline& baseline);

/// 2D snapshots are rasterized row-major before compression.
double cid(const Snapshot& snap, const ShuffleBaseline& baseline);

}  // namespace cidlab
