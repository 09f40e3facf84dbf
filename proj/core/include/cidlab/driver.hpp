#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cidlab/run_config.hpp"

namespace cidlab {

inline constexpr const char* kVersion = "0.1.0";

struct BaselineArgs {
  std::vector<std::size_t> lengths;
  int k = 64;
  std::uint64_t seed = 0;
  std::string out_path;
};

/// Builds (or extends) a shuffle-baseline file; existing entries are kept
/// verbatim, so reruns with a superset of lengths are idempotent.
void cmd_baseline(const BaselineArgs& args);

/// Runs the sampler for every (param, size) and writes snapshot files plus
/// log2-probability sidecar tables.
void cmd_sample(const RunConfig& cfg);

/// Full sweep: s_d (direct), E[CID], optional observable per (param, size);
/// appends one CSV row each.  Returns the table path.
std::string cmd_sweep(const RunConfig& cfg);

struct AnalyzeArgs {
  std::string table_path;
  std::string out_path;
  std::string op = "derive";  // derive | gamma | collapse
  std::string column = "s_d"; // s_d | cid | obs
  int smooth_rounds = 0;
  int derivative = 0;         // 0..3
  double window_lo = -0.4, window_hi = 0.4;
  double critical_start = 0.1, exponent_start = 1.5;
};

void cmd_analyze(const AnalyzeArgs& args);

struct BudgetArgs {
  double alpha = 0.3;
  long cap = 1 << 20;
};

/// N_s^alpha for the configured single (param, size) point.
long cmd_budget(const RunConfig& cfg, const BudgetArgs& args);

}  // namespace cidlab
