#include <doctest.h>

#include <cmath>

#include "cidlab/born_models.hpp"
#include "cidlab/fermion_tfim.hpp"
#include "support/oracles.hpp"

using namespace cidlab;

namespace {

Snapshot chain_snapshot(int length, std::uint32_t bits) {
  Snapshot s(1, length);
  for (int j = 0; j < length; ++j) s.values[j] = (bits >> j) & 1 ? -1 : 1;
  return s;
}

}  // namespace

TEST_CASE("J = 0 ground state is the trivial paramagnet") {
  TfimModel model(0.0, ChainGeom(6));
  const auto& m = model.ground_covariance();
  for (int j = 0; j < 6; ++j) {
    CHECK(m(2 * j, 2 * j + 1) == doctest::Approx(1.0));
    CHECK(m(2 * j + 1, 2 * j) == doctest::Approx(-1.0));
  }
  CHECK(model.log2_born_prob(chain_snapshot(6, 0)) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(model.ground_energy() == doctest::Approx(-6.0));
}

TEST_CASE("product-state covariances") {
  Snapshot up = chain_snapshot(4, 0);
  Snapshot down = chain_snapshot(4, 0xf);
  auto m_up = x_basis_covariance(up.values);
  auto m_down = x_basis_covariance(down.values);
  CHECK((m_up + m_down).norm() == doctest::Approx(0.0));  // particle-hole
  CHECK((m_up * m_up.transpose() - Eigen::MatrixXd::Identity(8, 8)).norm() ==
        doctest::Approx(0.0));
  // self overlap of a mixed product state
  Snapshot mixed = chain_snapshot(4, 0b0110);
  auto m = x_basis_covariance(mixed.values);
  CHECK(log2_overlap_sq(m, m) == doctest::Approx(0.0).epsilon(1e-12));
  // orthogonal product states
  CHECK(log2_overlap_sq(m_up, m_down) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("ground energy matches exact diagonalization") {
  for (double coupling : {0.3, 0.55, 0.9}) {
    auto ed = oracles::tfim_ed(coupling, 8);
    TfimModel model(coupling, ChainGeom(8));
    CHECK(model.ground_energy() == doctest::Approx(ed.energy).epsilon(1e-10));
  }
}

TEST_CASE("Born distribution matches exact diagonalization at L = 8") {
  for (double coupling : {0.2, 0.6, 0.8}) {
    auto ed = oracles::tfim_ed(coupling, 8);
    TfimModel model(coupling, ChainGeom(8));
    double total = 0.0;
    for (std::uint32_t bits = 0; bits < (1u << 8); ++bits) {
      const double lp = model.log2_born_prob(chain_snapshot(8, bits));
      const double p = std::isfinite(lp) ? std::exp2(lp) : 0.0;
      CHECK(std::abs(p - ed.rho[bits]) < 1e-8);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("odd-parity outcomes carry no weight") {
  TfimModel model(0.77, ChainGeom(9));
  double odd = 0.0;
  for (std::uint32_t bits = 0; bits < (1u << 9); ++bits) {
    if (std::popcount(bits) % 2 == 0) continue;
    const double lp = model.log2_born_prob(chain_snapshot(9, bits));
    if (std::isfinite(lp)) odd += std::exp2(lp);
  }
  CHECK(odd < 1e-10);
}

TEST_CASE("normalization is exhaustive at L = 12") {
  TfimModel model(0.7, ChainGeom(12));
  double total = 0.0;
  for (std::uint32_t bits = 0; bits < (1u << 12); ++bits) {
    const double lp = model.log2_born_prob(chain_snapshot(12, bits));
    if (std::isfinite(lp)) total += std::exp2(lp);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("GHZ point: even outcomes are uniform at 1/2^(L-1)") {
  TfimModel model(1.0, ChainGeom(4));
  CHECK(model.log2_born_prob(chain_snapshot(4, 0b0011)) == doctest::Approx(-3.0).epsilon(1e-9));
  double entropy = 0.0;
  for (std::uint32_t bits = 0; bits < 16; ++bits) {
    const double lp = model.log2_born_prob(chain_snapshot(4, bits));
    if (std::popcount(bits) % 2 == 0)
      CHECK(lp == doctest::Approx(-3.0).epsilon(1e-9));
    else
      CHECK(lp == -std::numeric_limits<double>::infinity());
    if (std::isfinite(lp)) entropy -= std::exp2(lp) * lp;
  }
  CHECK(entropy == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("spatial reflection symmetry of the Born weights") {
  // even-parity strings with weight well above the determinant noise floor
  TfimModel model(0.45, ChainGeom(7));
  for (std::uint32_t bits : {0b0000011u, 0b0000101u, 0b0011110u, 0b1100011u}) {
    std::uint32_t rev = 0;
    for (int j = 0; j < 7; ++j)
      if ((bits >> j) & 1) rev |= 1u << (6 - j);
    const double a = model.log2_born_prob(chain_snapshot(7, bits));
    const double b = model.log2_born_prob(chain_snapshot(7, rev));
    REQUIRE(a > -40.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("ground covariance purity") {
  for (double coupling : {0.0, 0.37, 1.0}) {
    TfimModel model(coupling, ChainGeom(10));
    const auto& m = model.ground_covariance();
    CHECK((m * m.transpose() - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS(TfimModel(-0.1, ChainGeom(4)));
  CHECK_THROWS(TfimModel(1.1, ChainGeom(4)));
  CHECK_THROWS(TfimModel(0.5, ChainGeom(4, Boundary::Periodic)));
  TfimModel model(0.5, ChainGeom(4));
  CHECK_THROWS(model.log2_born_prob(chain_snapshot(5, 0)));
}
