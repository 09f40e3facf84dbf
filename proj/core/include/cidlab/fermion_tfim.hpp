#pragma once

#include <Eigen/Dense>
#include <span>

#include "cidlab/lattice.hpp"

namespace cidlab {

/// Majorana covariance matrix M_{jk} = -i <gamma_j gamma_k - delta_{jk}>,
/// real antisymmetric, 2L x 2L.  Majoranas are ordered a_0, b_0, a_1, b_1, ...
/// with a = c + c^dag, b = -i(c - c^dag); the vacuum block is [[0,1],[-1,0]].
using CovarianceMatrix = Eigen::MatrixXd;

/// Covariance of the even-parity ground state of
///   H = -(1-J) sum_i X_i - J sum_i Z_i Z_{i+1}
/// on an open chain, with X_i = 1 - 2 c_i^dag c_i under Jordan-Wigner.
/// The even-parity state is selected at the J = 1 degeneracy.
CovarianceMatrix tfim_ground_covariance(double coupling, const ChainGeom& geom);

/// Covariance of the Fock product state with occupation n_j = (1 - x_j)/2.
CovarianceMatrix x_basis_covariance(std::span<const std::int8_t> x);

/// |<psi_1|psi_2>|^2 as log2, from sqrt(det((I - M1 M2)/2)) evaluated with a
/// pivoted LU in log space.  Returns -infinity when the determinant is
/// non-positive or underflows below 1e-300 (parity-forbidden outcomes).
double log2_overlap_sq(const CovarianceMatrix& m1, const CovarianceMatrix& m2);

/// Exact Born probabilities rho_x = |<x|Psi(J)>|^2 for the open-chain
/// transverse-field Ising ground state.
class TfimModel {
 public:
  TfimModel(double coupling, const ChainGeom& geom);

  double coupling() const { return coupling_; }
  int length() const { return geom_.length; }
  const CovarianceMatrix& ground_covariance() const { return m_ground_; }
  double ground_energy() const { return energy_; }

  /// log2 rho_x; -infinity for forbidden outcomes.
  double log2_born_prob(const Snapshot& x) const;

  /// (I - M_ground M_x)/2, the matrix whose determinant gives rho_x^2.
  Eigen::MatrixXd born_matrix(std::span<const std::int8_t> x) const;

 private:
  double coupling_;
  ChainGeom geom_;
  CovarianceMatrix m_ground_;
  double energy_;
};

}  // namespace cidlab
