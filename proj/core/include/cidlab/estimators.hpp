#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cidlab/baseline.hpp"
#include "cidlab/born_models.hpp"
#include "cidlab/sampler.hpp"

namespace cidlab {

struct EntropyEstimate {
  double value = 0.0;       // bits per site
  double std_error = 0.0;
  long n_samples = 0;
  int sites = 0;
  std::string tag;          // "direct" or "cid"
};

struct ScalarEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_used = 0;
  long n_dropped = 0;
};

/// Jackknife mean and standard error over blocks.
ScalarEstimate jackknife_mean(std::span<const std::vector<double>> blocks);

/// s_d from sampled log2 probabilities: mean of -log2(rho)/sites with a
/// jackknife standard error; blocks respect chain boundaries.
EntropyEstimate direct_entropy(std::span<const std::vector<double>> log2p_blocks, int sites);
EntropyEstimate direct_entropy(std::span<const double> log2_probs, int sites, int n_blocks = 16);

/// Sample mean and standard error of CID over snapshots.
EntropyEstimate cid_entropy(std::span<const std::vector<double>> cid_blocks, int sites);
EntropyEstimate cid_entropy(std::span<const Snapshot> snapshots, const ShuffleBaseline& baseline,
                            int n_blocks = 16);

/// Exact entropy density by exhaustive enumeration (site_count <= 24).
double exact_entropy_density(const BornModel& model);

struct ComplexityPoint {
  int size = 0;
  long n_samples = 0;
  double epsilon = 0.0;    // |E[CID] - s_d reference|
  double sigma_cid = 0.0;  // standard error of the CID mean
};

struct EpsilonOptions {
  std::uint64_t seed = 1;
  int chains = 4;
  long ref_multiplier = 10;       // reference run size when not enumerable
  int enumerable_sites = 12;      // use exact reference at or below this
  long thinning = -1;
};

/// epsilon and sigma_CID at one (model, N_s) point.  The s_d reference is
/// exact when the model is enumerable, otherwise a ref_multiplier-times
/// larger direct run with an independent seed.
ComplexityPoint epsilon_sigma(const BornModel& model, long n_samples,
                              const ShuffleBaseline& baseline, const EpsilonOptions& opts = {});

/// Smallest N_s (doubling search from 2) with sigma_CID <= alpha * epsilon;
/// both sides re-estimated at each trial size.  Throws when the cap is hit.
long sample_budget(const std::function<ComplexityPoint(long)>& probe, double alpha, long ns_cap);
long sample_budget(const BornModel& model, const ShuffleBaseline& baseline, double alpha,
                   long ns_cap, const EpsilonOptions& opts = {});

/// gamma = 2L (s_d(2L) - s_d(L)), the subleading order parameter.
double gamma_subleading(double sd_at_l, double sd_at_2l, int l);

struct VortexFeOptions {
  long n_samples = 0;
  std::uint64_t seed = 1;
  double exponent = 0.5;  // mean of (Z_flipped / Z)^exponent
  int chains = 4;         // MH chains for ensembles without direct sampling
  long thinning = -1;
};

/// Disorder-averaged free-energy cost of inserting one vortex at the central
/// plaquette: mean over bond samples of (Z_{J,l}/Z_J)^exponent, two
/// contractions per sample.  Nishimori draws bonds directly; the other 2D
/// models draw snapshots by Metropolis and use their reference bonds.
ScalarEstimate vortex_free_energy(const Grid2dBornModel& model, const VortexFeOptions& opts);

/// Disorder-averaged spin-spin correlator between dual spins (0, L) and
/// (floor(L/2), floor(L/2)) over direct Nishimori bond samples.
ScalarEstimate correlation_disorder_avg(const NishimoriModel& model, long n_samples,
                                        std::uint64_t seed);

}  // namespace cidlab
