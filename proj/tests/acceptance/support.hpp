#pragma once

// Shared fixtures for the acceptance suite: pinned baseline table, pinned
// run settings, and the pass/fail report line every criterion prints.

#include <doctest.h>

#include <cstdarg>
#include <cstdio>
#include <string>

#include "cidlab/baseline.hpp"
#include "cidlab/born_models.hpp"
#include "cidlab/estimators.hpp"
#include "cidlab/sampler.hpp"
#include "cidlab/thread_pool.hpp"

namespace acceptance {

inline constexpr std::uint64_t kBaselineSeed = 424242;
inline constexpr int kBaselineK = 64;

/// Baseline entries for every snapshot length the suite touches.
inline const cidlab::ShuffleBaseline& baseline() {
  static const cidlab::ShuffleBaseline table = [] {
    cidlab::ShuffleBaseline b;
    for (std::size_t n : {16, 24, 32, 48, 64, 96, 128,  // chains
                          81, 144, 169,                 // 2D grids (L = 9, 12, 13)
                          16384})                       // criterion 2
      b.add(n, kBaselineK, kBaselineSeed);
    return b;
  }();
  return table;
}

inline void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[criterion %02d] %-34s %s  (%s)\n", id, name.c_str(), pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(pass, "criterion ", id, ": ", name, " -- ", detail);
}

inline std::string fmt(const char* f, ...) {
  char buf[256];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct SweepPoint {
  double param = 0.0;
  cidlab::EntropyEstimate sd, cid;
};

/// s_d and E[CID] at one parameter point from `chains` Metropolis chains (or
/// direct sampling when available).
inline SweepPoint run_point(const cidlab::BornModel& model, double param, long n_samples,
                            std::uint64_t seed, int chains = 4,
                            const cidlab::ShuffleBaseline* table = &baseline()) {
  using namespace cidlab;
  std::vector<std::vector<double>> log2p(chains), cids(chains);
  const long per_chain = (n_samples + chains - 1) / chains;
  long left = n_samples;
  for (int c = 0; c < chains; ++c) {
    const long want = std::min<long>(per_chain, left);
    left -= want;
    if (want <= 0) continue;
    if (model.has_direct_sampling()) {
      const auto& nm = dynamic_cast<const NishimoriModel&>(model);
      Rng rng(derive_seed(seed, 0xd15ecuLL, c));
      for (long s = 0; s < want; ++s) {
        auto [snap, bonds] = nm.direct_sample(rng);
        log2p[c].push_back(nm.log2_prob_bonds(bonds));
        if (table) cids[c].push_back(cid(snap, *table));
      }
    } else {
      ChainConfig cfg;
      cfg.model = &model;
      cfg.n_samples = want;
      cfg.master_seed = seed;
      cfg.chain_index = static_cast<std::uint32_t>(c);
      run_chain(cfg, [&](ChainSample&& s) {
        log2p[c].push_back(s.log2_prob);
        if (table) cids[c].push_back(cid(s.snapshot, *table));
      });
    }
  }
  SweepPoint out;
  out.param = param;
  out.sd = direct_entropy(log2p, model.site_count());
  if (table) out.cid = cid_entropy(cids, model.site_count());
  return out;
}

}  // namespace acceptance
