#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cidlab {

/// Flat key-value configuration with [section] headers; '#' starts a comment.
/// See README for the full schema.
struct RunConfig {
  struct Model {
    std::string variant;            // tfim | deformed_paramagnet | nishimori | coherent
    std::vector<double> params;     // tuning-parameter grid (ascending)
    std::vector<int> sizes;         // chain lengths or vortex-grid sides
  } model;

  struct Sampler {
    long samples = 0;               // N_s per (param, size)
    int chains = 4;
    long thermalization = -1;       // -1 -> 5N single steps
    long thinning = -1;             // -1 -> N steps
    double bond_pair_weight = -1.0; // -1 -> model default mix
    double single_site_weight = -1.0;
    std::optional<std::uint64_t> seed;  // mandatory, no wall-clock default
  } sampler;

  struct Estimator {
    std::string baseline_file;
    double tol = 1e-8;
    int bond_cap = 128;
    std::string observable = "none";  // none | vortex_fe | correlation
    double fe_exponent = 0.5;
    int baseline_k = 64;
  } estimator;

  struct Output {
    std::string dir = ".";
    std::string prefix = "run";
  } output;

  int threads = 0;  // 0 -> hardware concurrency
  std::string raw_text;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Grid syntax: "a:step:b" (inclusive of b up to rounding) or a comma list.
std::vector<double> parse_grid(const std::string& spec);

/// FNV-1a hash of the canonical config text, embedded in output headers.
std::uint64_t config_hash(const std::string& text);

}  // namespace cidlab
