#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cidlab/born_models.hpp"
#include "cidlab/lattice.hpp"
#include "cidlab/rng.hpp"

namespace cidlab {

/// Metropolis-Hastings chain configuration.  Negative values select the
/// model defaults: thermalization = 5N single steps, thinning = N steps,
/// proposal mix = bond-pair only for chains, 50/50 bond-pair and single-site
/// for 2D grids.
struct ChainConfig {
  const BornModel* model = nullptr;
  double bond_pair_weight = -1.0;
  double single_site_weight = -1.0;
  long thermalization = -1;
  long thinning = -1;
  long n_samples = 0;
  std::uint64_t master_seed = 0;
  std::uint32_t chain_index = 0;
};

struct ChainSample {
  Snapshot snapshot;
  double log2_prob = 0.0;
};

struct ChainStats {
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;
  double acceptance_rate() const {
    return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  }
};

/// One Metropolis chain over snapshots: proposals flip a random
/// nearest-neighbour site pair or a random single site, accepted with
/// probability min(1, rho_proposed / rho_current).  Starts from the all-ones
/// snapshot; fully deterministic given (master_seed, chain_index).
class MhChain {
 public:
  explicit MhChain(const ChainConfig& cfg);

  void step();
  void run_steps(long n);
  const Snapshot& current() const { return eval_->current(); }
  double current_log2_prob() const { return eval_->current_log2_prob(); }
  const ChainStats& stats() const { return stats_; }
  long thinning() const { return thinning_; }
  long thermalization() const { return thermalization_; }

 private:
  const BornModel* model_;
  std::unique_ptr<ChainEvaluator> eval_;
  Rng rng_;
  double bond_weight_;
  long thermalization_;
  long thinning_;
  ChainStats stats_;
  std::vector<int> scratch_sites_;
};

/// Thermalizes, then emits n_samples thinned samples through the sink.
ChainStats run_chain(const ChainConfig& cfg, const std::function<void(ChainSample&&)>& sink);

std::vector<ChainSample> run_chain(const ChainConfig& cfg);

}  // namespace cidlab
