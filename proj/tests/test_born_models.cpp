#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cidlab/born_models.hpp"
#include "support/oracles.hpp"

using namespace cidlab;

namespace {

double total_probability(const BornModel& model) {
  const Snapshot shape = model.all_plus();
  double total = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t(1) << model.site_count()); ++bits) {
    const double lp = model.log2_prob(snapshot_from_bits(shape, bits));
    if (std::isfinite(lp)) total += std::exp2(lp);
  }
  return total;
}

}  // namespace

TEST_CASE("parameter maps") {
  CHECK(std::tanh(beta_from_q(0.2)) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(std::tanh(beta_from_p(0.05)) == doctest::Approx(0.9).epsilon(1e-12));
  const auto b = beta_from_phi(0.3);
  CHECK(std::abs(std::exp(2.0 * b) - std::complex<double>(0.0, std::tan(0.3))) < 1e-12);
  CHECK_THROWS(beta_from_q(0.5));
  CHECK_THROWS(beta_from_p(0.6));
  CHECK_THROWS(beta_from_phi(0.0));
  CHECK_THROWS(beta_from_phi(std::numbers::pi / 2));
  CHECK(std::tanh(0.672) == doctest::Approx(std::exp(-2.0 * dual_coupling_from_beta(0.672))));
}

TEST_CASE("normalization by enumeration for every variant") {
  for (int side : {2, 3}) {
    for (double q : {0.1, 0.3})
      CHECK(total_probability(*make_deformed_paramagnet(q, side)) ==
            doctest::Approx(1.0).epsilon(1e-6));
    for (double p : {0.05, 0.2, 0.5})
      CHECK(total_probability(*make_nishimori(p, side)) == doctest::Approx(1.0).epsilon(1e-6));
    for (double phi_over_pi : {0.1, 0.3})
      CHECK(total_probability(*make_coherent(phi_over_pi * std::numbers::pi, side)) ==
            doctest::Approx(1.0).epsilon(1e-6));
  }
  for (double coupling : {0.0, 0.4, 1.0})
    CHECK(total_probability(*make_tfim_model(coupling, 10)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("product-state limits") {
  auto dp = make_deformed_paramagnet(0.0, 3);
  CHECK(dp->log2_prob(dp->all_plus()) == doctest::Approx(0.0));
  Snapshot one_vortex = dp->all_plus();
  one_vortex.values[4] = -1;
  CHECK(dp->log2_prob(one_vortex) == -std::numeric_limits<double>::infinity());

  auto coh = make_coherent(1e-3, 3);
  CHECK(std::exp2(coh->log2_prob(coh->all_plus())) > 0.999);

  auto nish = make_nishimori(0.0, 3);
  Rng rng(1);
  for (int i = 0; i < 16; ++i) {
    auto [snap, bonds] = nish->direct_sample(rng);
    CHECK(snap == nish->all_plus());
  }
}

TEST_CASE("nishimori direct sampler matches the exact distribution on a 2x2 grid") {
  auto model = make_nishimori(0.13, 2);
  Rng rng(77);
  const long n = 1000000;
  std::vector<long> counts(16, 0);
  for (long i = 0; i < n; ++i) {
    auto [snap, bonds] = model->direct_sample(rng);
    int idx = 0;
    for (int j = 0; j < 4; ++j)
      if (snap.values[j] == -1) idx |= 1 << j;
    ++counts[idx];
  }
  const Snapshot shape = model->all_plus();
  for (int idx = 0; idx < 16; ++idx) {
    const double p = std::exp2(model->log2_prob(snapshot_from_bits(shape, idx)));
    const double se = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(counts[idx] / static_cast<double>(n) - p) < 4.0 * se + 1e-9);
  }
}

TEST_CASE("nishimori vortex density identity") {
  const double p = 0.1;
  auto model = make_nishimori(p, 6);
  Rng rng(3);
  const long n = 10000;
  double mean = 0.0;
  for (long i = 0; i < n; ++i) {
    auto [snap, bonds] = model->direct_sample(rng);
    long minus = 0;
    for (auto v : snap.values) minus += v == -1;
    mean += static_cast<double>(minus) / snap.size();
  }
  mean /= n;
  const double expected = 0.5 * (1.0 - std::pow(1.0 - 2.0 * p, 4));
  // binomial parity of four independent bonds per plaquette
  CHECK(expected == doctest::Approx(0.2952).epsilon(1e-3));
  const double se = std::sqrt(expected * (1.0 - expected) / (n * model->site_count()));
  CHECK(std::abs(mean - expected) < 3.0 * se * 3.0);  // sites within a sample correlate weakly
}

TEST_CASE("nishimori probabilities are gauge invariant across bond representatives") {
  auto model = make_nishimori(0.2, 3);
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    auto [snap, bonds] = model->direct_sample(rng);
    CHECK(model->log2_prob_bonds(bonds) ==
          doctest::Approx(model->log2_prob(snap)).epsilon(1e-9));
  }
}

TEST_CASE("even-parity validation flag") {
  DualSquareGeom g(2);
  NishimoriModel strict(0.1, g, {}, /*enforce_even_parity=*/true);
  Snapshot odd = strict.all_plus();
  odd.values[0] = -1;
  CHECK_THROWS(strict.log2_prob(odd));
  Snapshot even = strict.all_plus();
  even.values[0] = -1;
  even.values[1] = -1;
  CHECK(std::isfinite(strict.log2_prob(even)));
}

TEST_CASE("deformed paramagnet is invariant under negating the dual coupling") {
  // The sublattice-flip unitary maps the deformation K -> -K while leaving
  // every Born weight unchanged; in the dual picture that is a global bond
  // negation, so the probability table at -beta must match the one at +beta.
  const int side = 3;
  DualSquareGeom g(side);
  const double q = 0.22;
  auto model = make_deformed_paramagnet(q, side);
  const double beta = beta_from_q(q);
  const Snapshot shape = model->all_plus();
  for (std::uint32_t bits : {0u, 3u, 17u, 100u, 257u, 511u}) {
    Snapshot x = snapshot_from_bits(shape, bits);
    BondField bonds = reference_bonds(g, x);
    const double plus = oracles::enum_log_z(g, bonds, {beta, 0.0}).real();
    BondField negated = bonds;
    for (auto& v : negated.values) v = static_cast<std::int8_t>(-v);
    const double minus = oracles::enum_log_z(g, negated, {beta, 0.0}).real();
    CHECK(plus == doctest::Approx(minus).epsilon(1e-10));
    CHECK(vortex_of_bonds(g, negated) == x);
  }
}

TEST_CASE("tfim born model basics") {
  auto model = make_tfim_model(0.6, 8);
  CHECK(model->site_count() == 8);
  CHECK(model->site_bonds().size() == 7);
  Snapshot odd = model->all_plus();
  odd.values[3] = -1;
  CHECK(model->log2_prob(odd) < -33.2);  // parity-forbidden: below 1e-10
}

TEST_CASE("coherent model normalization constant is consistent with enumeration") {
  const int side = 2;
  DualSquareGeom g(side);
  const double phi = 0.1 * std::numbers::pi;
  auto model = make_coherent(phi, side);
  const auto beta = beta_from_phi(phi);
  double sum = 0.0;
  for (std::uint32_t bits = 0; bits < 16; ++bits) {
    Snapshot x = snapshot_from_bits(model->all_plus(), bits);
    sum += std::exp(2.0 * oracles::enum_log_z(g, reference_bonds(g, x), beta).real());
  }
  CHECK(model->log2_norm() == doctest::Approx(std::log2(sum)).epsilon(1e-8));
}

TEST_CASE("factory dispatch") {
  CHECK(make_model("tfim", 0.5, 8)->kind() == ModelKind::Tfim);
  CHECK(make_model("deformed_paramagnet", 0.1, 2)->kind() == ModelKind::DeformedParamagnet);
  CHECK(make_model("nishimori", 0.1, 2)->kind() == ModelKind::Nishimori);
  CHECK(make_model("coherent", 0.3, 2)->kind() == ModelKind::Coherent);
  CHECK_THROWS(make_model("unknown", 0.1, 2));
}
