#pragma once

#include <complex>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cidlab/fermion_tfim.hpp"
#include "cidlab/lattice.hpp"
#include "cidlab/rng.hpp"
#include "cidlab/tn_ising.hpp"

namespace cidlab {

enum class ModelKind { Tfim, DeformedParamagnet, Nishimori, Coherent };

std::string model_kind_name(ModelKind k);

/// Mutable handle a Metropolis chain uses to evaluate flip proposals against
/// one model.  Implementations may cache expensive state (e.g. a running
/// determinant inverse); refresh() must restore it from scratch.
class ChainEvaluator {
 public:
  virtual ~ChainEvaluator() = default;
  virtual const Snapshot& current() const = 0;
  virtual double current_log2_prob() const = 0;
  /// log2 probability of the state reached by flipping the listed sites.
  virtual double propose_flips(std::span<const int> sites) = 0;
  /// Commit the most recent proposal.
  virtual void accept() = 0;
  virtual void refresh() = 0;
};

/// A parameterized probability law over snapshots with exact log2
/// probabilities.  Immutable after construction; log2_prob and direct_sample
/// are safe to call concurrently with caller-owned RNG streams.
class BornModel {
 public:
  virtual ~BornModel() = default;
  virtual ModelKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual double parameter() const = 0;
  virtual int site_count() const = 0;
  virtual Snapshot all_plus() const = 0;
  /// Nearest-neighbour site pairs used by bond-pair flip proposals.
  virtual const std::vector<std::pair<int, int>>& site_bonds() const = 0;
  /// Normalized log2 probability; -infinity on forbidden outcomes.
  virtual double log2_prob(const Snapshot& x) const = 0;

  virtual bool has_direct_sampling() const { return false; }
  virtual std::pair<Snapshot, BondField> direct_sample(Rng&) const;

  virtual std::unique_ptr<ChainEvaluator> make_evaluator(Snapshot start) const;
};

/// Fills a snapshot of the given shape from the bits of `bits`
/// (bit j set -> site j is -1).  Used by exhaustive enumerations.
Snapshot snapshot_from_bits(const Snapshot& shape, std::uint64_t bits);

// --- parameter-to-temperature maps -------------------------------------------
// tanh(beta) = 1 - 2q       (deformed paramagnet)
// tanh(beta) = 1 - 2p       (Nishimori line)
// e^{2 beta} = i tan(phi)   (coherent errors)
// tanh(beta) = e^{-2K}      (1+1-D dual picture; recorded for reference, the
//                            chain model is evaluated with free fermions)
double beta_from_q(double q);
double beta_from_p(double p);
std::complex<double> beta_from_phi(double phi);
double dual_coupling_from_beta(double beta);

/// 1+1-D transverse-field Ising ground state, Born probabilities from the
/// free-fermion covariance formalism.
class TfimBornModel final : public BornModel {
 public:
  TfimBornModel(double coupling, const ChainGeom& geom, bool incremental_updates = true);

  ModelKind kind() const override { return ModelKind::Tfim; }
  std::string name() const override { return "tfim"; }
  double parameter() const override { return fermion_.coupling(); }
  int site_count() const override { return fermion_.length(); }
  Snapshot all_plus() const override { return Snapshot(1, fermion_.length()); }
  const std::vector<std::pair<int, int>>& site_bonds() const override { return bonds_; }
  double log2_prob(const Snapshot& x) const override { return fermion_.log2_born_prob(x); }
  std::unique_ptr<ChainEvaluator> make_evaluator(Snapshot start) const override;

  const TfimModel& fermion() const { return fermion_; }
  bool incremental_updates() const { return incremental_; }

 private:
  TfimModel fermion_;
  std::vector<std::pair<int, int>> bonds_;
  bool incremental_;
};

/// Shared machinery for the three dual-lattice models: rho_x built from the
/// random-bond Ising partition function Z_x at the model's inverse
/// temperature.
class Grid2dBornModel : public BornModel {
 public:
  int site_count() const override { return geom_.num_vortices(); }
  Snapshot all_plus() const override {
    return Snapshot(geom_.vortex_side(), geom_.vortex_side());
  }
  const std::vector<std::pair<int, int>>& site_bonds() const override { return bonds_; }
  double log2_prob(const Snapshot& x) const override;

  const DualSquareGeom& grid() const { return geom_; }
  std::complex<double> beta() const { return beta_; }
  const ContractOptions& contract_options() const { return opts_; }
  /// True at parameter values where rho collapses to the all-ones outcome
  /// (q = 0, p = 0), i.e. infinite dual coupling.
  bool delta_limit() const { return delta_limit_; }

  /// Same probability, evaluated from any bond representative of x
  /// (the partition function is gauge invariant).
  virtual double log2_prob_bonds(const BondField& bonds) const;

  /// Variant normalization: log2 rho from Re ln Z_x.
  virtual double log2_prob_from_logz(double re_log_z) const = 0;

  std::unique_ptr<ChainEvaluator> make_evaluator(Snapshot start) const override;

 protected:
  Grid2dBornModel(const DualSquareGeom& geom, std::complex<double> beta,
                  const ContractOptions& opts);
  /// True when the parameter sits at a delta-distribution limit (q = 0 etc.).
  bool delta_limit_ = false;

  DualSquareGeom geom_;
  std::complex<double> beta_;
  ContractOptions opts_;
  std::vector<std::pair<int, int>> bonds_;
};

/// rho_x proportional to Z_x(beta)^2 with tanh(beta) = 1 - 2q.
class DeformedParamagnetModel final : public Grid2dBornModel {
 public:
  DeformedParamagnetModel(double q, const DualSquareGeom& geom, const ContractOptions& opts = {});
  ModelKind kind() const override { return ModelKind::DeformedParamagnet; }
  std::string name() const override { return "deformed_paramagnet"; }
  double parameter() const override { return q_; }
  double log2_norm() const { return log_norm_ / std::numbers::ln2; }

 private:
  double log2_prob_from_logz(double re_log_z) const override;
  double q_;
  double log_norm_ = 0.0;  // ln sum_x Z_x^2
};

/// rho_x proportional to Z_x(beta) with tanh(beta) = 1 - 2p; direct sampling
/// by independent bond draws P(J = -1) = p projected onto vortices.
class NishimoriModel final : public Grid2dBornModel {
 public:
  NishimoriModel(double p, const DualSquareGeom& geom, const ContractOptions& opts = {},
                 bool enforce_even_parity = false);
  ModelKind kind() const override { return ModelKind::Nishimori; }
  std::string name() const override { return "nishimori"; }
  double parameter() const override { return p_; }
  double log2_prob(const Snapshot& x) const override;
  bool has_direct_sampling() const override { return true; }
  std::pair<Snapshot, BondField> direct_sample(Rng& rng) const override;
  double disorder_p() const { return p_; }

 private:
  double log2_prob_from_logz(double re_log_z) const override;
  double p_;
  bool enforce_even_parity_;
};

/// rho_x proportional to |Z_x(beta)|^2 with e^{2 beta} = i tan(phi).
class CoherentModel final : public Grid2dBornModel {
 public:
  CoherentModel(double phi, const DualSquareGeom& geom, const ContractOptions& opts = {});
  ModelKind kind() const override { return ModelKind::Coherent; }
  std::string name() const override { return "coherent"; }
  double parameter() const override { return phi_; }
  double log2_norm() const { return log_norm_ / std::numbers::ln2; }

 private:
  double log2_prob_from_logz(double re_log_z) const override;
  double phi_;
  double log_norm_ = 0.0;  // ln sum_x |Z_x|^2
};

std::unique_ptr<TfimBornModel> make_tfim_model(double coupling, int length,
                                               bool incremental_updates = true);
std::unique_ptr<DeformedParamagnetModel> make_deformed_paramagnet(double q, int side,
                                                                  const ContractOptions& = {});
std::unique_ptr<NishimoriModel> make_nishimori(double p, int side, const ContractOptions& = {});
std::unique_ptr<CoherentModel> make_coherent(double phi, int side, const ContractOptions& = {});

/// Factory keyed by the run-config variant tag.
std::unique_ptr<BornModel> make_model(const std::string& variant, double param, int size,
                                      const ContractOptions& opts = {});

}  // namespace cidlab
