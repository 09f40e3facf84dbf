#include "cidlab/fermion_tfim.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cidlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd majorana_coupling(double coupling, int L) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * L, 2 * L);
  for (int j = 0; j < L; ++j) {
    h(2 * j, 2 * j + 1) = 2.0 * (1.0 - coupling);
    h(2 * j + 1, 2 * j) = -2.0 * (1.0 - coupling);
  }
  for (int j = 0; j + 1 < L; ++j) {
    h(2 * j + 1, 2 * j + 2) = 2.0 * coupling;
    h(2 * j + 2, 2 * j + 1) = -2.0 * coupling;
  }
  return h;
}

}  // namespace

CovarianceMatrix tfim_ground_covariance(double coupling, const ChainGeom& geom) {
  if (coupling < 0.0 || coupling > 1.0)
    throw std::invalid_argument("tfim: coupling must lie in [0,1]");
  if (geom.boundary != Boundary::Open)
    throw std::invalid_argument("tfim: only open chains are supported");
  const int L = geom.length;
  const int n = 2 * L;

  // H = (i/4) gamma^T h gamma with h real antisymmetric:
  // X_i = -i a_i b_i, Z_i Z_{i+1} = -i b_i a_{i+1}.
  Eigen::MatrixXd h = majorana_coupling(coupling, L);

  Eigen::RealSchur<Eigen::MatrixXd> schur(h);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("tfim: Schur decomposition failed");
  Eigen::MatrixXd q = schur.matrixU();
  const Eigen::MatrixXd& t = schur.matrixT();

  // Split the quasi-triangular T into 2x2 antisymmetric blocks [[0,e],[-e,0]]
  // plus 1x1 zero blocks (zero Majorana modes), then orient every block so
  // that e >= 0 by swapping the corresponding columns of Q.
  const double block_tol = 1e-12 * (1.0 + h.cwiseAbs().maxCoeff());
  std::vector<int> singles;
  std::vector<std::pair<int, double>> pairs;  // (first column, energy)
  for (int i = 0; i < n;) {
    if (i + 1 < n && std::abs(t(i + 1, i)) > block_tol) {
      double e = t(i, i + 1);
      if (e < 0.0) {
        q.col(i).swap(q.col(i + 1));
        e = -e;
      }
      pairs.emplace_back(i, e);
      i += 2;
    } else {
      singles.push_back(i);
      i += 1;
    }
  }
  for (std::size_t s = 0; s + 1 < singles.size(); s += 2)
    pairs.emplace_back(-1, 0.0);  // placeholder, columns handled below
  if (singles.size() % 2 != 0)
    throw std::runtime_error("tfim: odd number of zero modes");
  // Repack zero-mode columns contiguously at the end so pairs are contiguous.
  if (!singles.empty()) {
    Eigen::MatrixXd q2(n, n);
    int col = 0;
    for (auto& [first, e] : pairs)
      if (first >= 0) {
        q2.col(col) = q.col(first);
        q2.col(col + 1) = q.col(first + 1);
        first = col;
        col += 2;
      }
    for (std::size_t s = 0; s + 1 < singles.size(); s += 2) {
      q2.col(col) = q.col(singles[s]);
      q2.col(col + 1) = q.col(singles[s + 1]);
      col += 2;
    }
    int zi = col - static_cast<int>(singles.size());
    for (auto& [first, e] : pairs)
      if (first < 0) {
        first = zi;
        zi += 2;
      }
    q = std::move(q2);
  }

  // Ground state: every Bogoliubov mode empty.  Its fermion parity equals
  // det(Q); enforce the even-parity sector by flipping the cheapest mode.
  double detq = q.determinant();
  if (detq < 0.0) {
    auto smallest = pairs.begin();
    for (auto it = pairs.begin(); it != pairs.end(); ++it)
      if (it->second < smallest->second) smallest = it;
    q.col(smallest->first).swap(q.col(smallest->first + 1));
  }

  Eigen::MatrixXd qm(n, n);  // Q * blockdiag([[0,1],[-1,0]])
  for (int k = 0; k < L; ++k) {
    qm.col(2 * k) = -q.col(2 * k + 1);
    qm.col(2 * k + 1) = q.col(2 * k);
  }
  CovarianceMatrix m = qm * q.transpose();

  if (((m * m.transpose()) - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::runtime_error("tfim: ground covariance is not pure");
  return m;
}

CovarianceMatrix x_basis_covariance(std::span<const std::int8_t> x) {
  const int L = static_cast<int>(x.size());
  CovarianceMatrix m = Eigen::MatrixXd::Zero(2 * L, 2 * L);
  for (int j = 0; j < L; ++j) {
    m(2 * j, 2 * j + 1) = static_cast<double>(x[j]);
    m(2 * j + 1, 2 * j) = -static_cast<double>(x[j]);
  }
  return m;
}

namespace {

double log2_sqrt_det(const Eigen::MatrixXd& a) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double logabs = 0.0;
  double sign = static_cast<double>(lu.permutationP().determinant());
  for (int i = 0; i < a.rows(); ++i) {
    double u = lu.matrixLU()(i, i);
    if (u == 0.0) return -kInf;
    if (u < 0.0) sign = -sign;
    logabs += std::log(std::abs(u));
  }
  if (sign <= 0.0 || logabs < std::log(1e-300)) return -kInf;
  return 0.5 * logabs / std::numbers::ln2;
}

}  // namespace

double log2_overlap_sq(const CovarianceMatrix& m1, const CovarianceMatrix& m2) {
  if (m1.rows() != m2.rows()) throw std::invalid_argument("overlap: dimension mismatch");
  Eigen::MatrixXd a = 0.5 * (Eigen::MatrixXd::Identity(m1.rows(), m1.cols()) - m1 * m2);
  return log2_sqrt_det(a);
}

TfimModel::TfimModel(double coupling, const ChainGeom& geom)
    : coupling_(coupling), geom_(geom), m_ground_(tfim_ground_covariance(coupling, geom)) {
  // E = <H> = (i/4) sum h_{jk} <gamma_j gamma_k> = (1/4) tr(h M).
  energy_ = 0.25 * (majorana_coupling(coupling_, geom_.length) * m_ground_).trace();
}

Eigen::MatrixXd TfimModel::born_matrix(std::span<const std::int8_t> x) const {
  const int L = geom_.length;
  if (static_cast<int>(x.size()) != L)
    throw std::invalid_argument("tfim: snapshot length mismatch");
  const int n = 2 * L;
  Eigen::MatrixXd a(n, n);
  // (M_g M_x).col(2j) = -x_j M_g.col(2j+1); .col(2j+1) = x_j M_g.col(2j)
  for (int j = 0; j < L; ++j) {
    const double xj = static_cast<double>(x[j]);
    a.col(2 * j) = 0.5 * xj * m_ground_.col(2 * j + 1);
    a.col(2 * j + 1) = -0.5 * xj * m_ground_.col(2 * j);
  }
  for (int i = 0; i < n; ++i) a(i, i) += 0.5;
  return a;
}

double TfimModel::log2_born_prob(const Snapshot& x) const {
  if (x.rows != 1 || x.cols != geom_.length)
    throw std::invalid_argument("tfim: snapshot does not match chain");
  return log2_sqrt_det(born_matrix(x.values));
}

}  // namespace cidlab
