#include "cidlab/born_models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cidlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::pair<int, int>> chain_bonds(int length) {
  std::vector<std::pair<int, int>> bonds;
  bonds.reserve(length - 1);
  for (int i = 0; i + 1 < length; ++i) bonds.emplace_back(i, i + 1);
  return bonds;
}

}  // namespace

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Tfim: return "tfim";
    case ModelKind::DeformedParamagnet: return "deformed_paramagnet";
    case ModelKind::Nishimori: return "nishimori";
    case ModelKind::Coherent: return "coherent";
  }
  return "?";
}

std::pair<Snapshot, BondField> BornModel::direct_sample(Rng&) const {
  throw std::logic_error(name() + ": direct sampling is not available");
}

Snapshot snapshot_from_bits(const Snapshot& shape, std::uint64_t bits) {
  Snapshot s = shape;
  for (int j = 0; j < s.size(); ++j)
    s.values[j] = (bits >> j) & 1u ? std::int8_t(-1) : std::int8_t(1);
  return s;
}

double beta_from_q(double q) {
  if (q < 0.0 || q >= 0.5) throw std::invalid_argument("deformed paramagnet: q must be in [0, 0.5)");
  return std::atanh(1.0 - 2.0 * q);
}

double beta_from_p(double p) {
  if (p < 0.0 || p > 0.5) throw std::invalid_argument("nishimori: p must be in [0, 0.5]");
  return std::atanh(1.0 - 2.0 * p);
}

std::complex<double> beta_from_phi(double phi) {
  if (phi <= 0.0 || phi >= std::numbers::pi / 2)
    throw std::invalid_argument("coherent: phi must be in (0, pi/2)");
  // e^{2 beta} = i tan(phi): principal branch.
  return {0.5 * std::log(std::tan(phi)), std::numbers::pi / 4};
}

double dual_coupling_from_beta(double beta) { return -0.5 * std::log(std::tanh(beta)); }

// --- generic full-evaluation chain handle ------------------------------------

namespace {

class FullEvaluator final : public ChainEvaluator {
 public:
  FullEvaluator(const BornModel* model, Snapshot start)
      : model_(model), x_(std::move(start)), log2p_(model_->log2_prob(x_)) {}

  const Snapshot& current() const override { return x_; }
  double current_log2_prob() const override { return log2p_; }

  double propose_flips(std::span<const int> sites) override {
    pending_.assign(sites.begin(), sites.end());
    Snapshot trial = x_;
    for (int s : pending_) trial.flip(s);
    pending_log2p_ = model_->log2_prob(trial);
    return pending_log2p_;
  }

  void accept() override {
    for (int s : pending_) x_.flip(s);
    log2p_ = pending_log2p_;
  }

  void refresh() override { log2p_ = model_->log2_prob(x_); }

 private:
  const BornModel* model_;
  Snapshot x_;
  double log2p_;
  std::vector<int> pending_;
  double pending_log2p_ = -kInf;
};

/// Rank-2k determinant updates for the free-fermion Born matrix
/// A(x) = (I - M_ground M_x)/2.  Flipping site j changes A by
/// u1 v1^T + u2 v2^T with u1 = -x_j g_{2j+1}, u2 = x_j g_{2j} (g = columns of
/// M_ground) and unit vectors v1 = e_{2j}, v2 = e_{2j+1}; the probability
/// ratio is det(I + V^T A^{-1} U) and A^{-1} follows by Woodbury.
class TfimIncrementalEvaluator final : public ChainEvaluator {
 public:
  TfimIncrementalEvaluator(const TfimModel* model, Snapshot start)
      : model_(model), x_(std::move(start)) {
    refresh();
  }

  const Snapshot& current() const override { return x_; }
  double current_log2_prob() const override { return log2p_; }

  double propose_flips(std::span<const int> sites) override {
    const auto& mg = model_->ground_covariance();
    const int k = 2 * static_cast<int>(sites.size());
    u_.resize(mg.rows(), k);
    vrows_.clear();
    for (std::size_t s = 0; s < sites.size(); ++s) {
      const int j = sites[s];
      const double xj = static_cast<double>(x_.values[j]);
      u_.col(2 * s) = -xj * mg.col(2 * j + 1);
      u_.col(2 * s + 1) = xj * mg.col(2 * j);
      vrows_.push_back(2 * j);
      vrows_.push_back(2 * j + 1);
    }
    cap_.resize(k, k);
    for (int r = 0; r < k; ++r) cap_.row(r) = ainv_.row(vrows_[r]) * u_;
    cap_ += Eigen::MatrixXd::Identity(k, k);

    cap_lu_.compute(cap_);
    double logabs = 0.0;
    double sign = static_cast<double>(cap_lu_.permutationP().determinant());
    for (int i = 0; i < k; ++i) {
      double d = cap_lu_.matrixLU()(i, i);
      if (d == 0.0) {
        pending_ok_ = false;
        return -kInf;
      }
      if (d < 0.0) sign = -sign;
      logabs += std::log(std::abs(d));
    }
    if (sign <= 0.0) {
      pending_ok_ = false;
      return -kInf;
    }
    pending_sites_.assign(sites.begin(), sites.end());
    pending_logratio_ = logabs;
    pending_ok_ = true;
    return log2p_ + 0.5 * logabs / std::numbers::ln2;
  }

  void accept() override {
    if (!pending_ok_) throw std::logic_error("tfim evaluator: accepting an invalid proposal");
    w_ = ainv_ * u_;
    y_.resize(static_cast<Eigen::Index>(vrows_.size()), ainv_.cols());
    for (std::size_t r = 0; r < vrows_.size(); ++r) y_.row(r) = ainv_.row(vrows_[r]);
    ainv_.noalias() -= w_ * cap_lu_.solve(y_);
    logabsdet_ += pending_logratio_;
    log2p_ = 0.5 * logabsdet_ / std::numbers::ln2;
    for (int s : pending_sites_) x_.flip(s);
    pending_ok_ = false;
    if (++accepts_since_refresh_ >= kRefreshEvery) refresh();
  }

  void refresh() override {
    Eigen::MatrixXd a = model_->born_matrix(x_.values);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    double logabs = 0.0;
    double sign = static_cast<double>(lu.permutationP().determinant());
    for (int i = 0; i < a.rows(); ++i) {
      double d = lu.matrixLU()(i, i);
      if (d < 0.0) sign = -sign;
      logabs += std::log(std::abs(d));
    }
    if (sign <= 0.0)
      throw std::runtime_error("tfim evaluator: chain state has non-positive probability");
    ainv_ = lu.inverse();
    logabsdet_ = logabs;
    log2p_ = 0.5 * logabsdet_ / std::numbers::ln2;
    accepts_since_refresh_ = 0;
  }

 private:
  static constexpr int kRefreshEvery = 128;

  const TfimModel* model_;
  Snapshot x_;
  Eigen::MatrixXd ainv_;
  double logabsdet_ = 0.0;
  double log2p_ = 0.0;

  Eigen::MatrixXd u_, cap_, w_, y_;
  Eigen::PartialPivLU<Eigen::MatrixXd> cap_lu_;
  std::vector<int> vrows_;
  std::vector<int> pending_sites_;
  double pending_logratio_ = 0.0;
  bool pending_ok_ = false;
  int accepts_since_refresh_ = 0;
};

/// Chain handle for the dual-lattice models: tracks a bond representative of
/// the current snapshot and recontracts only the network rows above the
/// lowest flipped edge, against cached boundary environments.
template <class S>
class GridChainEvaluator final : public ChainEvaluator {
 public:
  GridChainEvaluator(const Grid2dBornModel* model, Snapshot start)
      : model_(model),
        geom_(&model->grid()),
        beta_(scalar_beta(model->beta())),
        x_(std::move(start)),
        bonds_(reference_bonds(*geom_, x_)),
        edge_parity_(geom_->num_edges(), 0),
        contractor_(network_from_bonds(), model->contract_options()) {
    log2p_ = model_->log2_prob_from_logz(contractor_.contract().log_z.real());
  }

  const Snapshot& current() const override { return x_; }
  double current_log2_prob() const override { return log2p_; }

  double propose_flips(std::span<const int> sites) override {
    pending_edges_.clear();
    for (int site : sites)
      for (int e : vortex_insertion_path(*geom_, site)) edge_parity_[e] ^= 1;
    for (int site : sites)
      for (int e : vortex_insertion_path(*geom_, site))
        if (edge_parity_[e]) {
          pending_edges_.push_back(e);
          edge_parity_[e] = 0;
        }
    pending_sites_.assign(sites.begin(), sites.end());
    if (pending_edges_.empty()) {
      pending_log2p_ = log2p_;
      pending_dirty_ = geom_->spin_side();
      pending_net_ = contractor_.network();
      return log2p_;
    }
    pending_net_ = contractor_.network();
    pending_dirty_ = geom_->spin_side();
    for (int e : pending_edges_) {
      set_ising_edge<S>(pending_net_, *geom_, e,
                        ising_edge_weight<S>(beta_, -bonds_.values[e]));
      pending_dirty_ = std::min(pending_dirty_, edge_network_row(*geom_, e));
    }
    const auto r = contractor_.contract_replaced(pending_net_, pending_dirty_);
    pending_log2p_ = model_->log2_prob_from_logz(r.log_z.real());
    return pending_log2p_;
  }

  void accept() override {
    for (int e : pending_edges_) bonds_.values[e] = static_cast<std::int8_t>(-bonds_.values[e]);
    for (int s : pending_sites_) x_.flip(s);
    contractor_.commit(pending_net_, pending_dirty_);
    log2p_ = pending_log2p_;
  }

  void refresh() override {
    bonds_ = reference_bonds(*geom_, x_);
    contractor_ = gridtn::BoundaryContractor<S>(network_from_bonds(), model_->contract_options());
    log2p_ = model_->log2_prob_from_logz(contractor_.contract().log_z.real());
  }

 private:
  static S scalar_beta(std::complex<double> beta) {
    if constexpr (std::is_same_v<S, double>)
      return beta.real();
    else
      return beta;
  }

  gridtn::GridNetwork<S> network_from_bonds() const {
    const int n = geom_->spin_side();
    gridtn::GridNetwork<S> net(n, n);
    for (int e = 0; e < geom_->num_edges(); ++e)
      set_ising_edge<S>(net, *geom_, e, ising_edge_weight<S>(beta_, bonds_.values[e]));
    return net;
  }

  const Grid2dBornModel* model_;
  const DualSquareGeom* geom_;
  S beta_;
  Snapshot x_;
  BondField bonds_;
  double log2p_ = 0.0;
  std::vector<std::uint8_t> edge_parity_;
  gridtn::BoundaryContractor<S> contractor_;

  gridtn::GridNetwork<S> pending_net_{1, 1};
  std::vector<int> pending_edges_;
  std::vector<int> pending_sites_;
  int pending_dirty_ = 0;
  double pending_log2p_ = -kInf;
};

}  // namespace

std::unique_ptr<ChainEvaluator> BornModel::make_evaluator(Snapshot start) const {
  if (start.size() != site_count())
    throw std::invalid_argument("make_evaluator: snapshot does not match model");
  return std::make_unique<FullEvaluator>(this, std::move(start));
}

// --- TFIM ---------------------------------------------------------------------

TfimBornModel::TfimBornModel(double coupling, const ChainGeom& geom, bool incremental_updates)
    : fermion_(coupling, geom), bonds_(chain_bonds(geom.length)), incremental_(incremental_updates) {}

std::unique_ptr<ChainEvaluator> TfimBornModel::make_evaluator(Snapshot start) const {
  if (start.size() != site_count())
    throw std::invalid_argument("make_evaluator: snapshot does not match model");
  if (!incremental_) return BornModel::make_evaluator(std::move(start));
  return std::make_unique<TfimIncrementalEvaluator>(&fermion_, std::move(start));
}

// --- dual-lattice family --------------------------------------------------------

Grid2dBornModel::Grid2dBornModel(const DualSquareGeom& geom, std::complex<double> beta,
                                 const ContractOptions& opts)
    : geom_(geom), beta_(beta), opts_(opts), bonds_(geom.vortex_bonds()) {}

std::unique_ptr<ChainEvaluator> Grid2dBornModel::make_evaluator(Snapshot start) const {
  if (start.size() != site_count())
    throw std::invalid_argument("make_evaluator: snapshot does not match model");
  if (delta_limit_) return BornModel::make_evaluator(std::move(start));
  if (beta_.imag() == 0.0)
    return std::make_unique<GridChainEvaluator<double>>(this, std::move(start));
  return std::make_unique<GridChainEvaluator<std::complex<double>>>(this, std::move(start));
}

double Grid2dBornModel::log2_prob(const Snapshot& x) const {
  if (x.rows != geom_.vortex_side() || x.cols != geom_.vortex_side())
    throw std::invalid_argument("log2_prob: snapshot does not match grid");
  if (delta_limit_) {
    for (auto v : x.values)
      if (v != 1) return -kInf;
    return 0.0;
  }
  BondField bonds = reference_bonds(geom_, x);
  return log2_prob_bonds(bonds);
}

double Grid2dBornModel::log2_prob_bonds(const BondField& bonds) const {
  if (delta_limit_) {
    Snapshot x = vortex_of_bonds(geom_, bonds);
    for (auto v : x.values)
      if (v != 1) return -kInf;
    return 0.0;
  }
  IsingInstance inst{&geom_, &bonds, beta_};
  ContractionResult r = contract_log_z(inst, opts_);
  return log2_prob_from_logz(r.log_z.real());
}

DeformedParamagnetModel::DeformedParamagnetModel(double q, const DualSquareGeom& geom,
                                                 const ContractOptions& opts)
    : Grid2dBornModel(geom, std::complex<double>(0.0, 0.0), opts), q_(q) {
  if (q == 0.0) {
    delta_limit_ = true;
    return;
  }
  beta_ = beta_from_q(q);
  log_norm_ = replica_norm_logsum(geom_, beta_, opts_);
}

double DeformedParamagnetModel::log2_prob_from_logz(double re_log_z) const {
  return (2.0 * re_log_z - log_norm_) / std::numbers::ln2;
}

NishimoriModel::NishimoriModel(double p, const DualSquareGeom& geom, const ContractOptions& opts,
                               bool enforce_even_parity)
    : Grid2dBornModel(geom, std::complex<double>(0.0, 0.0), opts),
      p_(p),
      enforce_even_parity_(enforce_even_parity) {
  if (p == 0.0) {
    delta_limit_ = true;
    return;
  }
  beta_ = beta_from_p(p);
}

double NishimoriModel::log2_prob(const Snapshot& x) const {
  if (enforce_even_parity_) {
    int parity = 1;
    for (auto v : x.values) parity *= v;
    if (parity != 1)
      throw std::invalid_argument("nishimori: odd-parity snapshot with constraint enforced");
  }
  return Grid2dBornModel::log2_prob(x);
}

double NishimoriModel::log2_prob_from_logz(double re_log_z) const {
  // Closed-form normalization from per-bond weight factorization:
  // log2 rho = log2 Z_x + (E/2) log2(p(1-p)) - 1.
  const double e = static_cast<double>(geom_.num_edges());
  return re_log_z / std::numbers::ln2 + 0.5 * e * std::log2(p_ * (1.0 - p_)) - 1.0;
}

std::pair<Snapshot, BondField> NishimoriModel::direct_sample(Rng& rng) const {
  BondField bonds(geom_);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (auto& b : bonds.values)
    if (uni(rng) < p_) b = -1;
  return {vortex_of_bonds(geom_, bonds), std::move(bonds)};
}

CoherentModel::CoherentModel(double phi, const DualSquareGeom& geom, const ContractOptions& opts)
    : Grid2dBornModel(geom, beta_from_phi(phi), opts), phi_(phi) {
  log_norm_ = replica_norm_logsum(geom_, beta_, opts_);
}

double CoherentModel::log2_prob_from_logz(double re_log_z) const {
  return (2.0 * re_log_z - log_norm_) / std::numbers::ln2;
}

// --- factories -----------------------------------------------------------------

std::unique_ptr<TfimBornModel> make_tfim_model(double coupling, int length,
                                               bool incremental_updates) {
  return std::make_unique<TfimBornModel>(coupling, ChainGeom(length), incremental_updates);
}

std::unique_ptr<DeformedParamagnetModel> make_deformed_paramagnet(double q, int side,
                                                                  const ContractOptions& opts) {
  return std::make_unique<DeformedParamagnetModel>(q, DualSquareGeom(side), opts);
}

std::unique_ptr<NishimoriModel> make_nishimori(double p, int side, const ContractOptions& opts) {
  return std::make_unique<NishimoriModel>(p, DualSquareGeom(side), opts);
}

std::unique_ptr<CoherentModel> make_coherent(double phi, int side, const ContractOptions& opts) {
  return std::make_unique<CoherentModel>(phi, DualSquareGeom(side), opts);
}

std::unique_ptr<BornModel> make_model(const std::string& variant, double param, int size,
                                      const ContractOptions& opts) {
  if (variant == "tfim") return make_tfim_model(param, size);
  if (variant == "deformed_paramagnet") return make_deformed_paramagnet(param, size, opts);
  if (variant == "nishimori") return make_nishimori(param, size, opts);
  if (variant == "coherent") return make_coherent(param, size, opts);
  throw std::invalid_argument("unknown model variant: " + variant);
}

}  // namespace cidlab
