#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <memory>
#include <vector>

#include "cidlab/lattice.hpp"

namespace cidlab {

struct ContractOptions {
  double tol = 1e-8;   // total discarded-weight budget for one contraction
  int bond_cap = 128;  // hard cap on the boundary-MPS bond dimension
};

struct ContractionResult {
  std::complex<double> log_z{0.0, 0.0};  // natural log; Im is the phase
  double truncation_error = 0.0;         // sum of relative discarded weights
  int max_bond_dim = 1;
};

/// 2D Ising model on the dual lattice: per-edge +/-1 couplings at complex
/// inverse temperature.  beta.imag() == 0 selects the real-arithmetic path.
struct IsingInstance {
  const DualSquareGeom* geom = nullptr;
  const BondField* bonds = nullptr;
  std::complex<double> beta{0.0, 0.0};
};

/// log of Z = sum_s exp(beta * sum_e J_e s_i s_j) over the (L+1)^2 dual
/// spins, contracted bottom-to-top with boundary-MPS compression.
ContractionResult contract_log_z(const IsingInstance& inst, const ContractOptions& opts = {});

/// <s_i s_j> for two dual spins, from two contractions sharing the boundary
/// environment below the first marked row.  Real beta only.
double spin_correlation(const IsingInstance& inst, int spin_i, int spin_j,
                        const ContractOptions& opts = {});

/// ln sum_x |Z_x(beta)|^2 over all vortex configurations, via the gauge-orbit
/// identity: the sum collapses to 2^(E+1) times a single uniform two-layer
/// contraction with aligned-edge weight cosh(beta + conj(beta)) and
/// anti-aligned weight cosh(beta - conj(beta)).
double replica_norm_logsum(const DualSquareGeom& geom, std::complex<double> beta,
                           const ContractOptions& opts = {});

// --- low-level grid engine ---------------------------------------------------
// Sum over +/-1 spins on a rows x cols open grid of products of per-edge 2x2
// weights and optional per-site factors.  Exposed for tests and for model
// code that needs non-square or non-Ising weights.

namespace gridtn {

template <class Scalar>
class GridNetwork {
 public:
  using Weight = Eigen::Matrix<Scalar, 2, 2>;

  GridNetwork(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void set_h_weight(int r, int c, const Weight& w);  // (r,c)-(r,c+1)
  void set_v_weight(int r, int c, const Weight& w);  // (r,c)-(r+1,c)
  void set_all_edges(const Weight& w);
  void set_site_mark(int r, int c, Scalar plus, Scalar minus);

  const Weight& h_weight(int r, int c) const { return hw_[r * (cols_ - 1) + c]; }
  const Weight& v_weight(int r, int c) const { return vw_[r * cols_ + c]; }
  const std::array<Scalar, 2>& mark(int r, int c) const { return marks_[r * cols_ + c]; }

  ContractionResult contract(const ContractOptions& opts) const;

 private:
  int rows_, cols_;
  std::vector<Weight> hw_, vw_;
  std::vector<std::array<Scalar, 2>> marks_;
};

extern template class GridNetwork<double>;
extern template class GridNetwork<std::complex<double>>;

template <class Scalar>
struct StackImpl;

/// Bottom-boundary contraction with per-row cached states.  Metropolis
/// proposals modify tensors only at rows >= some index, so the partial
/// contraction below that row is reused; commits invalidate the cache lazily.
/// Row r of the network owns the vertical edges (r-1, c)-(r, c), its own
/// horizontal edges, and its site marks.
template <class Scalar>
class BoundaryContractor {
 public:
  BoundaryContractor(GridNetwork<Scalar> net, const ContractOptions& opts);
  ~BoundaryContractor();
  BoundaryContractor(BoundaryContractor&&) noexcept;
  BoundaryContractor& operator=(BoundaryContractor&&) noexcept;

  const GridNetwork<Scalar>& network() const;
  /// logZ of the committed network.
  ContractionResult contract();
  /// logZ when rows >= dirty_row take their tensors from alt.
  ContractionResult contract_replaced(const GridNetwork<Scalar>& alt, int dirty_row);
  /// Replaces the committed network; tensors may differ at rows >= dirty_row.
  void commit(const GridNetwork<Scalar>& alt, int dirty_row);

 private:
  std::unique_ptr<StackImpl<Scalar>> impl_;
};

extern template class BoundaryContractor<double>;
extern template class BoundaryContractor<std::complex<double>>;

}  // namespace gridtn

/// Builds the dual-lattice Ising network for an instance (real-beta variant
/// asserts beta.imag() == 0).
gridtn::GridNetwork<double> ising_network_real(const IsingInstance& inst);
gridtn::GridNetwork<std::complex<double>> ising_network_complex(const IsingInstance& inst);

/// Transfer weight of one Ising edge: W(s, s') = exp(beta J s s').
template <class Scalar>
Eigen::Matrix<Scalar, 2, 2> ising_edge_weight(Scalar beta, int coupling) {
  const Scalar w = std::exp(beta * Scalar(coupling));
  Eigen::Matrix<Scalar, 2, 2> m;
  m << w, Scalar(1) / w, Scalar(1) / w, w;
  return m;
}

/// Network row whose absorption reads the given dual edge (the cache below
/// this row stays valid when the edge changes).
inline int edge_network_row(const DualSquareGeom& g, int e) {
  if (g.is_h_edge(e)) return e / g.vortex_side();
  return (e - g.num_h_edges()) / g.spin_side() + 1;
}

template <class Scalar>
void set_ising_edge(gridtn::GridNetwork<Scalar>& net, const DualSquareGeom& g, int e,
                    const Eigen::Matrix<Scalar, 2, 2>& w) {
  if (g.is_h_edge(e)) {
    net.set_h_weight(e / g.vortex_side(), e % g.vortex_side(), w);
  } else {
    const int k = e - g.num_h_edges();
    net.set_v_weight(k / g.spin_side(), k % g.spin_side(), w);
  }
}

/// logZ of the instance and of the instance with the listed edges flipped,
/// sharing the boundary environment below the first changed row.
std::pair<ContractionResult, ContractionResult> contract_log_z_flipped(
    const IsingInstance& inst, const std::vector<int>& flip_edges,
    const ContractOptions& opts = {});

}  // namespace cidlab
