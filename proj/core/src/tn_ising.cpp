#include "cidlab/tn_ising.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cidlab {

namespace gridtn {

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
struct MpsState {
  std::vector<std::array<Mat<S>, 2>> site;
  double log_scale = 0.0;
  double trunc_sum = 0.0;
  int max_chi = 1;
  bool zero = false;  // the partial contraction vanished identically
};

template <class S>
Mat<S> kron2(const Mat<S>& a, const Mat<S>& b) {
  Mat<S> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <class S>
double max_abs(const Eigen::Matrix<S, 2, 2>& w) {
  return w.cwiseAbs().maxCoeff();
}

/// Horizontal-chain MPS for row r: f(t_0..t_{n-1}) = prod_c H_{r,c}(t_c,t_{c+1}),
/// with per-edge weights rescaled to unit max entry (scale goes to log_scale).
template <class S>
std::vector<std::array<Mat<S>, 2>> row_chain(const GridNetwork<S>& net, int r,
                                             bool with_marks, double& log_scale, bool& zero) {
  const int n = net.cols();
  std::vector<std::array<Mat<S>, 2>> chain(n);
  std::vector<Eigen::Matrix<S, 2, 2>> w(n > 1 ? n - 1 : 0);
  for (int c = 0; c + 1 < n; ++c) {
    w[c] = net.h_weight(r, c);
    double s = max_abs<S>(w[c]);
    if (s == 0.0) {
      zero = true;
      return chain;
    }
    w[c] /= s;
    log_scale += std::log(s);
  }
  auto mark = [&](int c, int t) -> S {
    return with_marks ? net.mark(r, c)[t] : S(1);
  };
  if (n == 1) {
    for (int t = 0; t < 2; ++t) chain[0][t] = Mat<S>::Constant(1, 1, mark(0, t));
    return chain;
  }
  for (int t = 0; t < 2; ++t) {
    chain[0][t] = Mat<S>::Zero(1, 2);
    chain[0][t](0, t) = mark(0, t);
    chain[n - 1][t] = Mat<S>(2, 1);
    for (int a = 0; a < 2; ++a) chain[n - 1][t](a, 0) = w[n - 2](a, t) * mark(n - 1, t);
  }
  for (int c = 1; c + 1 < n; ++c)
    for (int t = 0; t < 2; ++t) {
      chain[c][t] = Mat<S>::Zero(2, 2);
      for (int a = 0; a < 2; ++a) chain[c][t](a, t) = w[c - 1](a, t) * mark(c, t);
    }
  return chain;
}

template <class S>
struct ThinSvd {
  Mat<S> u;            // orthonormal columns
  Eigen::VectorXd sv;  // descending
  Mat<S> vh;           // orthonormal rows
};

/// Thin SVD.  The fast path diagonalizes the Gram matrix of the smaller
/// side: that factor is exactly orthonormal, and the other factor's error in
/// a direction is bounded by its own singular value, which keeps the overall
/// contraction error at the truncation scale.  Budgets tighter than 1e-7 use
/// the dense SVD instead.
template <class S>
void thin_svd(const Mat<S>& m, bool accurate, ThinSvd<S>& out) {
  if (accurate) {
    if (std::min(m.rows(), m.cols()) <= 32) {
      Eigen::JacobiSVD<Mat<S>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
      out.u = svd.matrixU();
      out.sv = svd.singularValues();
      out.vh = svd.matrixV().adjoint();
    } else {
      Eigen::BDCSVD<Mat<S>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
      out.u = svd.matrixU();
      out.sv = svd.singularValues();
      out.vh = svd.matrixV().adjoint();
    }
    return;
  }
  const bool rows_small = m.rows() <= m.cols();
  const Eigen::Index r = rows_small ? m.rows() : m.cols();
  Mat<S> gram = rows_small ? Mat<S>(m * m.adjoint()) : Mat<S>(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Mat<S>> eig(gram);
  out.sv.resize(r);
  Mat<S> basis(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    out.sv(i) = std::sqrt(std::max(eig.eigenvalues()(r - 1 - i), 0.0));
    basis.col(i) = eig.eigenvectors().col(r - 1 - i);
  }
  const double floor = out.sv(0) > 0.0 ? out.sv(0) * 1e-16 : 1.0;
  if (rows_small) {
    out.u = std::move(basis);
    out.vh.noalias() = out.u.adjoint() * m;
    for (Eigen::Index i = 0; i < r; ++i) out.vh.row(i) /= std::max(out.sv(i), floor);
  } else {
    out.u.noalias() = m * basis;
    for (Eigen::Index i = 0; i < r; ++i) out.u.col(i) /= std::max(out.sv(i), floor);
    out.vh = basis.adjoint();
  }
}

template <class S>
void compress(MpsState<S>& m, const ContractOptions& opts, double per_svd_tol) {
  const int n = static_cast<int>(m.site.size());
  if (m.zero) return;
  const bool accurate = per_svd_tol < 1e-7;
  ThinSvd<S> svd;
  if (n > 1) {
    // Left-to-right orthonormalization sweep, then right-to-left truncation.
    for (int c = 0; c + 1 < n; ++c) {
      auto& t = m.site[c];
      const Eigen::Index rl = t[0].rows(), rr = t[0].cols();
      Mat<S> packed(2 * rl, rr);
      packed.topRows(rl) = t[0];
      packed.bottomRows(rl) = t[1];
      thin_svd(packed, accurate, svd);
      t[0] = svd.u.topRows(rl);
      t[1] = svd.u.bottomRows(rl);
      Mat<S> carry = svd.sv.template cast<S>().asDiagonal() * svd.vh;
      m.site[c + 1][0] = carry * m.site[c + 1][0];
      m.site[c + 1][1] = carry * m.site[c + 1][1];
    }
    for (int c = n - 1; c >= 1; --c) {
      auto& t = m.site[c];
      const Eigen::Index rr = t[0].cols();
      Mat<S> packed(t[0].rows(), 2 * rr);
      packed.leftCols(rr) = t[0];
      packed.rightCols(rr) = t[1];
      thin_svd(packed, accurate, svd);
      const double total = svd.sv.squaredNorm();
      if (total == 0.0) {
        m.zero = true;
        return;
      }
      Eigen::Index rank = svd.sv.size();
      while (rank > 1) {
        double disc = svd.sv.tail(svd.sv.size() - rank + 1).squaredNorm();
        if (std::sqrt(disc / total) > per_svd_tol) break;
        --rank;
      }
      if (rank > opts.bond_cap)
        throw std::runtime_error(
            "tn contraction: bond dimension cap exceeded (nonconvergent compression)");
      double disc = rank < svd.sv.size() ? svd.sv.tail(svd.sv.size() - rank).squaredNorm() : 0.0;
      m.trunc_sum += std::sqrt(disc / total);
      m.max_chi = std::max<int>(m.max_chi, static_cast<int>(rank));
      t[0] = svd.vh.block(0, 0, rank, rr);
      t[1] = svd.vh.block(0, rr, rank, rr);
      Mat<S> carry = svd.u.leftCols(rank) * svd.sv.head(rank).template cast<S>().asDiagonal();
      m.site[c - 1][0] = m.site[c - 1][0] * carry;
      m.site[c - 1][1] = m.site[c - 1][1] * carry;
    }
  }
  double norm = std::sqrt(m.site[0][0].squaredNorm() + m.site[0][1].squaredNorm());
  if (norm == 0.0) {
    m.zero = true;
    return;
  }
  m.site[0][0] /= norm;
  m.site[0][1] /= norm;
  m.log_scale += std::log(norm);
}

template <class S>
MpsState<S> init_state(const GridNetwork<S>& net) {
  MpsState<S> m;
  m.site = row_chain(net, 0, /*with_marks=*/true, m.log_scale, m.zero);
  return m;
}

template <class S>
void absorb_row(MpsState<S>& m, const GridNetwork<S>& net, int r, const ContractOptions& opts,
                double per_svd_tol) {
  if (m.zero) return;
  const int n = net.cols();
  for (int c = 0; c < n; ++c) {
    Eigen::Matrix<S, 2, 2> v = net.v_weight(r - 1, c);
    double s = max_abs<S>(v);
    if (s == 0.0) {
      m.zero = true;
      return;
    }
    v /= s;
    m.log_scale += std::log(s);
    const auto& mk = net.mark(r, c);
    auto& t = m.site[c];
    std::array<Mat<S>, 2> next;
    for (int u = 0; u < 2; ++u) next[u] = (t[0] * v(0, u) + t[1] * v(1, u)) * mk[u];
    t = std::move(next);
  }
  if (n > 1) {
    bool zero = false;
    auto chain = row_chain(net, r, /*with_marks=*/false, m.log_scale, zero);
    if (zero) {
      m.zero = true;
      return;
    }
    for (int c = 0; c < n; ++c)
      for (int t = 0; t < 2; ++t) m.site[c][t] = kron2(m.site[c][t], chain[c][t]);
  }
  compress(m, opts, per_svd_tol);
}

template <class S>
ContractionResult finish(const MpsState<S>& m) {
  ContractionResult out;
  out.truncation_error = m.trunc_sum;
  out.max_bond_dim = m.max_chi;
  if (m.zero) {
    out.log_z = {-kInf, 0.0};
    return out;
  }
  double log_scale = m.log_scale;
  Mat<S> v = m.site[0][0] + m.site[0][1];
  for (std::size_t c = 1; c < m.site.size(); ++c) {
    v = v * (m.site[c][0] + m.site[c][1]);
    double s = v.cwiseAbs().maxCoeff();
    if (s == 0.0) {
      out.log_z = {-kInf, 0.0};
      return out;
    }
    v /= s;
    log_scale += std::log(s);
  }
  std::complex<double> z(v(0, 0));
  if (z == std::complex<double>(0.0, 0.0)) {
    out.log_z = {-kInf, 0.0};
    return out;
  }
  out.log_z = std::complex<double>(log_scale, 0.0) + std::log(z);
  return out;
}

// Budget for one SVD so that each row compression discards at most tol.
template <class S>
double svd_budget(const GridNetwork<S>& net, const ContractOptions& opts) {
  return opts.tol / static_cast<double>(std::max(net.cols(), 1));
}

}  // namespace detail

template <class Scalar>
GridNetwork<Scalar>::GridNetwork(int rows, int cols)
    : rows_(rows),
      cols_(cols),
      hw_(static_cast<std::size_t>(rows) * std::max(cols - 1, 0), Weight::Ones()),
      vw_(static_cast<std::size_t>(std::max(rows - 1, 0)) * cols, Weight::Ones()),
      marks_(static_cast<std::size_t>(rows) * cols, {Scalar(1), Scalar(1)}) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("GridNetwork: empty grid");
}

template <class Scalar>
void GridNetwork<Scalar>::set_h_weight(int r, int c, const Weight& w) {
  hw_[r * (cols_ - 1) + c] = w;
}

template <class Scalar>
void GridNetwork<Scalar>::set_v_weight(int r, int c, const Weight& w) {
  vw_[r * cols_ + c] = w;
}

template <class Scalar>
void GridNetwork<Scalar>::set_all_edges(const Weight& w) {
  for (auto& x : hw_) x = w;
  for (auto& x : vw_) x = w;
}

template <class Scalar>
void GridNetwork<Scalar>::set_site_mark(int r, int c, Scalar plus, Scalar minus) {
  marks_[r * cols_ + c] = {plus, minus};
}

template <class Scalar>
ContractionResult GridNetwork<Scalar>::contract(const ContractOptions& opts) const {
  const double per_svd = detail::svd_budget(*this, opts);
  detail::MpsState<Scalar> m = detail::init_state(*this);
  for (int r = 1; r < rows_; ++r) detail::absorb_row(m, *this, r, opts, per_svd);
  return detail::finish(m);
}

template class GridNetwork<double>;
template class GridNetwork<std::complex<double>>;

template <class Scalar>
struct StackImpl {
  GridNetwork<Scalar> net;
  ContractOptions opts;
  double per_svd;
  std::vector<detail::MpsState<Scalar>> stack;  // stack[r]: rows 0..r absorbed
  int valid = -1;                               // highest usable stack index

  StackImpl(GridNetwork<Scalar> n, const ContractOptions& o)
      : net(std::move(n)), opts(o), per_svd(detail::svd_budget(net, o)) {
    stack.resize(net.rows());
  }

  void ensure(int row) {
    if (valid < 0) {
      stack[0] = detail::init_state(net);
      valid = 0;
    }
    while (valid < row) {
      stack[valid + 1] = stack[valid];
      detail::absorb_row(stack[valid + 1], net, valid + 1, opts, per_svd);
      ++valid;
    }
  }
};

template <class Scalar>
BoundaryContractor<Scalar>::BoundaryContractor(GridNetwork<Scalar> net,
                                               const ContractOptions& opts)
    : impl_(std::make_unique<StackImpl<Scalar>>(std::move(net), opts)) {}

template <class Scalar>
BoundaryContractor<Scalar>::~BoundaryContractor() = default;
template <class Scalar>
BoundaryContractor<Scalar>::BoundaryContractor(BoundaryContractor&&) noexcept = default;
template <class Scalar>
BoundaryContractor<Scalar>& BoundaryContractor<Scalar>::operator=(BoundaryContractor&&) noexcept =
    default;

template <class Scalar>
const GridNetwork<Scalar>& BoundaryContractor<Scalar>::network() const {
  return impl_->net;
}

template <class Scalar>
ContractionResult BoundaryContractor<Scalar>::contract() {
  impl_->ensure(impl_->net.rows() - 1);
  return detail::finish(impl_->stack[impl_->net.rows() - 1]);
}

template <class Scalar>
ContractionResult BoundaryContractor<Scalar>::contract_replaced(const GridNetwork<Scalar>& alt,
                                                                int dirty_row) {
  const int rows = impl_->net.rows();
  detail::MpsState<Scalar> m;
  int start;
  if (dirty_row <= 0) {
    m = detail::init_state(alt);
    detail::compress(m, impl_->opts, impl_->per_svd);
    start = 1;
  } else {
    impl_->ensure(dirty_row - 1);
    m = impl_->stack[dirty_row - 1];
    start = dirty_row;
  }
  for (int r = start; r < rows; ++r) detail::absorb_row(m, alt, r, impl_->opts, impl_->per_svd);
  return detail::finish(m);
}

template <class Scalar>
void BoundaryContractor<Scalar>::commit(const GridNetwork<Scalar>& alt, int dirty_row) {
  impl_->net = alt;
  impl_->valid = std::min(impl_->valid, dirty_row - 1);
}

template class BoundaryContractor<double>;
template class BoundaryContractor<std::complex<double>>;

}  // namespace gridtn

namespace {

void check_instance(const IsingInstance& inst) {
  if (!inst.geom || !inst.bonds) throw std::invalid_argument("IsingInstance: null geometry/bonds");
  if (inst.bonds->side != inst.geom->vortex_side())
    throw std::invalid_argument("IsingInstance: bond field does not match geometry");
}

template <class S>
gridtn::GridNetwork<S> build_ising_network(const IsingInstance& inst, S beta) {
  const DualSquareGeom& g = *inst.geom;
  const int n = g.spin_side();
  gridtn::GridNetwork<S> net(n, n);
  auto weight = [&](int e) { return ising_edge_weight<S>(beta, inst.bonds->values[e]); };
  for (int r = 0; r < n; ++r)
    for (int c = 0; c + 1 < n; ++c) net.set_h_weight(r, c, weight(g.h_edge(r, c)));
  for (int r = 0; r + 1 < n; ++r)
    for (int c = 0; c < n; ++c) net.set_v_weight(r, c, weight(g.v_edge(r, c)));
  return net;
}

template <class S>
std::pair<ContractionResult, ContractionResult> flipped_pair(const IsingInstance& inst, S beta,
                                                             const std::vector<int>& flip_edges,
                                                             const ContractOptions& opts) {
  gridtn::BoundaryContractor<S> contractor(build_ising_network<S>(inst, beta), opts);
  gridtn::GridNetwork<S> alt = contractor.network();
  int dirty = inst.geom->spin_side();
  for (int e : flip_edges) {
    set_ising_edge<S>(alt, *inst.geom, e, ising_edge_weight<S>(beta, -inst.bonds->values[e]));
    dirty = std::min(dirty, edge_network_row(*inst.geom, e));
  }
  return {contractor.contract(), contractor.contract_replaced(alt, dirty)};
}

}  // namespace

gridtn::GridNetwork<double> ising_network_real(const IsingInstance& inst) {
  check_instance(inst);
  if (inst.beta.imag() != 0.0)
    throw std::invalid_argument("ising_network_real: beta must be real");
  return build_ising_network<double>(inst, inst.beta.real());
}

gridtn::GridNetwork<std::complex<double>> ising_network_complex(const IsingInstance& inst) {
  check_instance(inst);
  return build_ising_network<std::complex<double>>(inst, inst.beta);
}

ContractionResult contract_log_z(const IsingInstance& inst, const ContractOptions& opts) {
  check_instance(inst);
  if (inst.beta.imag() == 0.0) return ising_network_real(inst).contract(opts);
  return ising_network_complex(inst).contract(opts);
}

std::pair<ContractionResult, ContractionResult> contract_log_z_flipped(
    const IsingInstance& inst, const std::vector<int>& flip_edges, const ContractOptions& opts) {
  check_instance(inst);
  if (inst.beta.imag() == 0.0)
    return flipped_pair<double>(inst, inst.beta.real(), flip_edges, opts);
  return flipped_pair<std::complex<double>>(inst, inst.beta, flip_edges, opts);
}

double spin_correlation(const IsingInstance& inst, int spin_i, int spin_j,
                        const ContractOptions& opts) {
  check_instance(inst);
  if (inst.beta.imag() != 0.0)
    throw std::invalid_argument("spin_correlation: beta must be real");
  if (spin_i == spin_j || spin_i < 0 || spin_j < 0 || spin_i >= inst.geom->num_spins() ||
      spin_j >= inst.geom->num_spins())
    throw std::invalid_argument("spin_correlation: invalid spin pair");

  const int n = inst.geom->spin_side();
  auto net = ising_network_real(inst);
  auto marked = net;
  marked.set_site_mark(spin_i / n, spin_i % n, 1.0, -1.0);
  marked.set_site_mark(spin_j / n, spin_j % n, 1.0, -1.0);

  // Share the boundary environment below the first marked row.
  const int first_row = std::min(spin_i / n, spin_j / n);
  const double per_svd = gridtn::detail::svd_budget(net, opts);
  ContractionResult rz, rm;
  if (first_row == 0) {
    rz = net.contract(opts);
    rm = marked.contract(opts);
  } else {
    auto shared = gridtn::detail::init_state(net);
    for (int r = 1; r < first_row; ++r) gridtn::detail::absorb_row(shared, net, r, opts, per_svd);
    auto branch = shared;
    for (int r = first_row; r < n; ++r) gridtn::detail::absorb_row(shared, net, r, opts, per_svd);
    for (int r = first_row; r < n; ++r) gridtn::detail::absorb_row(branch, marked, r, opts, per_svd);
    rz = gridtn::detail::finish(shared);
    rm = gridtn::detail::finish(branch);
  }
  if (rm.log_z.real() == -std::numeric_limits<double>::infinity()) return 0.0;
  std::complex<double> diff = rm.log_z - rz.log_z;
  return std::exp(diff.real()) * std::cos(diff.imag());
}

double replica_norm_logsum(const DualSquareGeom& geom, std::complex<double> beta,
                           const ContractOptions& opts) {
  const double w_aligned = std::cosh(2.0 * beta.real());
  const double w_anti = std::cos(2.0 * beta.imag());
  const int n = geom.spin_side();
  gridtn::GridNetwork<double> net(n, n);
  Eigen::Matrix2d w;
  w << w_aligned, w_anti, w_anti, w_aligned;
  net.set_all_edges(w);
  ContractionResult r = net.contract(opts);
  if (std::abs(std::remainder(r.log_z.imag(), 2.0 * std::numbers::pi)) > 1e-8)
    throw std::runtime_error("replica_norm_logsum: negative two-layer sum");
  return (geom.num_edges() + 1) * std::numbers::ln2 + r.log_z.real();
}

}  // namespace cidlab
