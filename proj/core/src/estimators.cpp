#include "cidlab/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cidlab/tn_ising.hpp"

namespace cidlab {

namespace {

std::vector<std::vector<double>> split_blocks(std::span<const double> xs, int n_blocks) {
  if (xs.empty()) throw std::invalid_argument("empty sample set");
  n_blocks = std::max(1, std::min<int>(n_blocks, static_cast<int>(xs.size())));
  std::vector<std::vector<double>> blocks(n_blocks);
  for (std::size_t i = 0; i < xs.size(); ++i)
    blocks[i * n_blocks / xs.size()].push_back(xs[i]);
  return blocks;
}

}  // namespace

ScalarEstimate jackknife_mean(std::span<const std::vector<double>> blocks) {
  long n = 0;
  double sum = 0.0;
  for (const auto& b : blocks) {
    n += static_cast<long>(b.size());
    for (double v : b) sum += v;
  }
  if (n == 0) throw std::invalid_argument("jackknife: empty sample set");
  ScalarEstimate est;
  est.n_used = n;
  est.value = sum / static_cast<double>(n);
  const long nb = static_cast<long>(blocks.size());
  if (nb < 2 || n < 2) return est;  // no resolvable error
  double ss = 0.0;
  double mean_of_del = 0.0;
  std::vector<double> deleted(nb);
  for (long b = 0; b < nb; ++b) {
    double bs = 0.0;
    for (double v : blocks[b]) bs += v;
    const double nd = static_cast<double>(n - static_cast<long>(blocks[b].size()));
    deleted[b] = nd > 0 ? (sum - bs) / nd : est.value;
    mean_of_del += deleted[b];
  }
  mean_of_del /= static_cast<double>(nb);
  for (long b = 0; b < nb; ++b) ss += (deleted[b] - mean_of_del) * (deleted[b] - mean_of_del);
  est.std_error = std::sqrt(static_cast<double>(nb - 1) / static_cast<double>(nb) * ss);
  return est;
}

EntropyEstimate direct_entropy(std::span<const std::vector<double>> log2p_blocks, int sites) {
  if (sites < 1) throw std::invalid_argument("direct_entropy: sites must be positive");
  std::vector<std::vector<double>> per_site(log2p_blocks.size());
  for (std::size_t b = 0; b < log2p_blocks.size(); ++b) {
    per_site[b].reserve(log2p_blocks[b].size());
    for (double lp : log2p_blocks[b]) per_site[b].push_back(-lp / sites);
  }
  ScalarEstimate s = jackknife_mean(per_site);
  if (s.n_used < 2) throw std::invalid_argument("direct_entropy: need at least two samples");
  return EntropyEstimate{s.value, s.std_error, s.n_used, sites, "direct"};
}

EntropyEstimate direct_entropy(std::span<const double> log2_probs, int sites, int n_blocks) {
  auto blocks = split_blocks(log2_probs, n_blocks);
  return direct_entropy(blocks, sites);
}

EntropyEstimate cid_entropy(std::span<const std::vector<double>> cid_blocks, int sites) {
  ScalarEstimate s = jackknife_mean(cid_blocks);
  return EntropyEstimate{s.value, s.std_error, s.n_used, sites, "cid"};
}

EntropyEstimate cid_entropy(std::span<const Snapshot> snapshots, const ShuffleBaseline& baseline,
                            int n_blocks) {
  if (snapshots.empty()) throw std::invalid_argument("cid_entropy: empty sample set");
  std::vector<double> vals;
  vals.reserve(snapshots.size());
  for (const auto& s : snapshots) vals.push_back(cid(s, baseline));
  auto blocks = split_blocks(vals, n_blocks);
  return cid_entropy(blocks, snapshots[0].size());
}

double exact_entropy_density(const BornModel& model) {
  const int n = model.site_count();
  if (n > 24) throw std::invalid_argument("exact_entropy_density: model too large to enumerate");
  const Snapshot shape = model.all_plus();
  double s = 0.0;
  double total = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << n); ++bits) {
    const double lp = model.log2_prob(snapshot_from_bits(shape, bits));
    if (!std::isfinite(lp)) continue;
    const double p = std::exp2(lp);
    s -= p * lp;
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw std::runtime_error("exact_entropy_density: distribution is not normalized");
  return s / n;
}

namespace {

struct SampledRun {
  std::vector<std::vector<double>> cid_blocks;
  std::vector<std::vector<double>> log2p_blocks;
};

SampledRun sample_run(const BornModel& model, long n_samples, const ShuffleBaseline* baseline,
                      std::uint64_t seed, int chains, long thinning) {
  SampledRun run;
  chains = std::max(1, chains);
  run.cid_blocks.resize(chains);
  run.log2p_blocks.resize(chains);
  const long per_chain = (n_samples + chains - 1) / chains;
  long left = n_samples;
  for (int c = 0; c < chains; ++c) {
    const long want = std::min<long>(per_chain, left);
    left -= want;
    if (want <= 0) continue;
    if (model.has_direct_sampling()) {
      Rng rng(derive_seed(seed, 0xd15ecuLL, c));
      const auto& nm = dynamic_cast<const NishimoriModel&>(model);
      for (long s = 0; s < want; ++s) {
        auto [snap, bonds] = nm.direct_sample(rng);
        if (baseline) run.cid_blocks[c].push_back(cid(snap, *baseline));
        run.log2p_blocks[c].push_back(nm.log2_prob_bonds(bonds));
      }
    } else {
      ChainConfig cfg;
      cfg.model = &model;
      cfg.n_samples = want;
      cfg.master_seed = seed;
      cfg.chain_index = static_cast<std::uint32_t>(c);
      cfg.thinning = thinning;
      run_chain(cfg, [&](ChainSample&& s) {
        if (baseline) run.cid_blocks[c].push_back(cid(s.snapshot, *baseline));
        run.log2p_blocks[c].push_back(s.log2_prob);
      });
    }
  }
  return run;
}

}  // namespace

ComplexityPoint epsilon_sigma(const BornModel& model, long n_samples,
                              const ShuffleBaseline& baseline, const EpsilonOptions& opts) {
  if (n_samples < 2) throw std::invalid_argument("epsilon_sigma: need n_samples >= 2");
  SampledRun run = sample_run(model, n_samples, &baseline, opts.seed, opts.chains, opts.thinning);
  EntropyEstimate ecid = cid_entropy(run.cid_blocks, model.site_count());

  double sd_ref;
  if (model.site_count() <= opts.enumerable_sites) {
    sd_ref = exact_entropy_density(model);
  } else {
    SampledRun ref = sample_run(model, n_samples * opts.ref_multiplier, nullptr,
                                derive_seed(opts.seed, 0x5ef5eedULL), opts.chains, opts.thinning);
    sd_ref = direct_entropy(ref.log2p_blocks, model.site_count()).value;
  }
  ComplexityPoint pt;
  pt.size = model.site_count();
  pt.n_samples = n_samples;
  pt.epsilon = std::abs(ecid.value - sd_ref);
  pt.sigma_cid = ecid.std_error;
  return pt;
}

long sample_budget(const std::function<ComplexityPoint(long)>& probe, double alpha, long ns_cap) {
  if (alpha <= 0.0) throw std::invalid_argument("sample_budget: alpha must be positive");
  for (long n = 2; n <= ns_cap; n *= 2) {
    ComplexityPoint pt = probe(n);
    if (pt.sigma_cid <= alpha * pt.epsilon) return n;
  }
  throw std::runtime_error("sample_budget: cap exceeded without satisfying the criterion");
}

long sample_budget(const BornModel& model, const ShuffleBaseline& baseline, double alpha,
                   long ns_cap, const EpsilonOptions& opts) {
  return sample_budget(
      [&](long n) { return epsilon_sigma(model, n, baseline, opts); }, alpha, ns_cap);
}

double gamma_subleading(double sd_at_l, double sd_at_2l, int l) {
  return 2.0 * static_cast<double>(l) * (sd_at_2l - sd_at_l);
}

ScalarEstimate vortex_free_energy(const Grid2dBornModel& model, const VortexFeOptions& opts) {
  if (opts.n_samples < 2) throw std::invalid_argument("vortex_free_energy: need n_samples >= 2");
  if (model.delta_limit())  // infinite dual coupling: the inserted vortex costs everything
    return ScalarEstimate{0.0, 0.0, opts.n_samples, 0};
  const DualSquareGeom& g = model.grid();
  const int l = g.vortex_side();
  const int center = g.vortex_index(l / 2, l / 2);
  const std::vector<int> path = vortex_insertion_path(g, center);
  const int chains = std::max(1, opts.chains);

  std::vector<std::vector<double>> blocks(chains);
  long dropped = 0;
  auto add_sample = [&](int block, BondField&& bonds) {
    IsingInstance inst{&g, &bonds, model.beta()};
    try {
      auto [rz, rl] = contract_log_z_flipped(inst, path, model.contract_options());
      blocks[block].push_back(
          std::exp(opts.exponent * (rl.log_z.real() - rz.log_z.real())));
    } catch (const std::runtime_error&) {
      ++dropped;  // contraction failure: drop the sample but keep count
    }
  };

  const long per_chain = (opts.n_samples + chains - 1) / chains;
  long left = opts.n_samples;
  for (int c = 0; c < chains; ++c) {
    const long want = std::min<long>(per_chain, left);
    left -= want;
    if (want <= 0) continue;
    if (model.has_direct_sampling()) {
      Rng rng(derive_seed(opts.seed, 0xfeedULL, c));
      for (long s = 0; s < want; ++s) {
        auto [snap, bonds] = model.direct_sample(rng);
        add_sample(c, std::move(bonds));
      }
    } else {
      ChainConfig cfg;
      cfg.model = &model;
      cfg.n_samples = want;
      cfg.master_seed = derive_seed(opts.seed, 0xfeedULL);
      cfg.chain_index = static_cast<std::uint32_t>(c);
      cfg.thinning = opts.thinning;
      run_chain(cfg, [&](ChainSample&& s) {
        add_sample(c, reference_bonds(g, s.snapshot));
      });
    }
  }
  ScalarEstimate est = jackknife_mean(blocks);
  est.n_dropped = dropped;
  return est;
}

ScalarEstimate correlation_disorder_avg(const NishimoriModel& model, long n_samples,
                                        std::uint64_t seed) {
  if (n_samples < 2) throw std::invalid_argument("correlation_disorder_avg: need n_samples >= 2");
  if (model.delta_limit())  // p = 0: clean ferromagnet at infinite coupling
    return ScalarEstimate{1.0, 0.0, n_samples, 0};
  const DualSquareGeom& g = model.grid();
  const int l = g.vortex_side();
  const int spin_i = g.spin_index(0, l);
  const int spin_j = g.spin_index(l / 2, l / 2);
  const int chains = 4;
  std::vector<std::vector<double>> blocks(chains);
  const long per_chain = (n_samples + chains - 1) / chains;
  long left = n_samples;
  for (int c = 0; c < chains; ++c) {
    const long want = std::min<long>(per_chain, left);
    left -= want;
    Rng rng(derive_seed(seed, 0xc0221ULL, c));
    for (long s = 0; s < want; ++s) {
      auto [snap, bonds] = model.direct_sample(rng);
      if (model.disorder_p() == 0.5) {
        blocks[c].push_back(0.0);  // beta = 0: spins are exactly independent
        continue;
      }
      IsingInstance inst{&g, &bonds, model.beta()};
      blocks[c].push_back(spin_correlation(inst, spin_i, spin_j, model.contract_options()));
    }
  }
  return jackknife_mean(blocks);
}

}  // namespace cidlab
