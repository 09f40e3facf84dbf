#include "cidlab/baseline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cidlab/lz77.hpp"
#include "cidlab/rng.hpp"

namespace cidlab {

ShuffleBaseline::Entry ShuffleBaseline::compute_entry(std::size_t n, int k, std::uint64_t seed) {
  if (n < 1 || k < 1) throw std::invalid_argument("shuffle baseline: need n >= 1, k >= 1");
  double sum = 0.0;
  std::vector<std::int8_t> seq(n);
  for (int rep = 0; rep < k; ++rep) {
    Rng rng(derive_seed(seed, n, static_cast<std::uint64_t>(rep)));
    for (auto& s : seq) s = (rng() & 1u) ? std::int8_t(1) : std::int8_t(-1);
    sum += lz77_code_length_bits(seq);
  }
  return Entry{n, k, seed, sum / k};
}

void ShuffleBaseline::add(std::size_t n, int k, std::uint64_t seed) {
  if (has(n)) return;  // existing entries are preserved verbatim
  entries_[n] = compute_entry(n, k, seed);
}

void ShuffleBaseline::insert(const Entry& e) { entries_[e.n] = e; }

double ShuffleBaseline::bits_for(std::size_t n) const {
  auto it = entries_.find(n);
  if (it == entries_.end())
    throw std::out_of_range("shuffle baseline: no entry for length " + std::to_string(n));
  return it->second.bits;
}

void ShuffleBaseline::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write baseline file: " + path);
  out << "# N K seed bits\n";
  char buf[128];
  for (const auto& [n, e] : entries_) {
    std::snprintf(buf, sizeof(buf), "%zu %d %llu %.17g\n", e.n, e.k,
                  static_cast<unsigned long long>(e.seed), e.bits);
    out << buf;
  }
}

ShuffleBaseline ShuffleBaseline::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open baseline file: " + path);
  ShuffleBaseline b;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Entry e;
    unsigned long long seed = 0;
    if (!(ss >> e.n >> e.k >> seed >> e.bits))
      throw std::runtime_error("malformed baseline line: " + line);
    e.seed = seed;
    b.insert(e);
  }
  return b;
}

double cid(std::span<const std::int8_t> seq, const ShuffleBaseline& baseline) {
  double denom = baseline.bits_for(seq.size());
  if (denom <= 0.0)
    throw std::out_of_range("shuffle baseline: degenerate entry for length " +
                            std::to_string(seq.size()));
  return lz77_code_length_bits(seq) / denom;
}

double cid(const Snapshot& snap, const ShuffleBaseline& baseline) {
  return cid(std::span<const std::int8_t>(snap.values), baseline);  // values are row-major
}

}  // namespace cidlab
