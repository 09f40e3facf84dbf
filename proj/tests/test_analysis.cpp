#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cidlab/analysis.hpp"

using namespace cidlab;

TEST_CASE("smoothing basics") {
  std::vector<double> constant(9, 2.5);
  auto s = smooth(constant, 1);
  REQUIRE(s.size() == 7);
  for (double v : s) CHECK(v == doctest::Approx(2.5));

  std::vector<double> linear;
  for (int i = 0; i < 11; ++i) linear.push_back(0.3 * i - 1.0);
  auto sl = smooth(linear, 2);
  REQUIRE(sl.size() == 7);
  for (std::size_t i = 0; i < sl.size(); ++i)
    CHECK(sl[i] == doctest::Approx(0.3 * (i + 2) - 1.0).epsilon(1e-12));

  std::vector<double> spike(9, 0.0);
  spike[4] = 3.0;
  auto sp = smooth(spike, 1);
  CHECK(sp[2] == doctest::Approx(1.0));
  CHECK(sp[3] == doctest::Approx(1.0));
  CHECK(sp[4] == doctest::Approx(1.0));
  CHECK(sp[1] == doctest::Approx(0.0));

  CHECK(smooth(constant, 0) == constant);
  CHECK_THROWS(smooth(std::vector<double>(4, 1.0), 2));  // shorter than 2r+1
}

TEST_CASE("finite differences are exact on low-order polynomials") {
  const double dx = 0.1;
  std::vector<double> quad, cubic, lin;
  for (int i = 0; i < 12; ++i) {
    const double x = dx * i;
    lin.push_back(2.0 - 3.0 * x);
    quad.push_back(1.0 + x + 2.5 * x * x);
    cubic.push_back(x * x * x);
  }
  for (double v : finite_difference(lin, 1, dx)) CHECK(v == doctest::Approx(-3.0).epsilon(1e-10));
  for (double v : finite_difference(quad, 2, dx)) CHECK(v == doctest::Approx(5.0).epsilon(1e-9));
  for (double v : finite_difference(cubic, 3, dx)) CHECK(v == doctest::Approx(6.0).epsilon(1e-7));
  CHECK_THROWS(finite_difference(quad, 4, dx));
  CHECK_THROWS(finite_difference(std::vector<double>(3, 1.0), 3, dx));
}

TEST_CASE("first derivative converges at second order") {
  auto max_err = [](double dx) {
    std::vector<double> ys;
    const int n = static_cast<int>(1.0 / dx);
    for (int i = 0; i <= n; ++i) ys.push_back(std::sin(dx * i));
    auto d = finite_difference(ys, 1, dx);
    double err = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      err = std::max(err, std::abs(d[i] - std::cos(dx * (i + 1))));
    return err;
  };
  const double e1 = max_err(1e-2), e2 = max_err(5e-3);
  CHECK(e1 < 2e-5);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("filters compose and propagate errors") {
  auto f = compose(derivative_filter(1, 0.5), smoothing_filter(2));
  CHECK(f.taps.size() == 7);
  // affine commutation: filter(a y + b) = a filter(y) + b for smoothing
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> y(15);
  for (auto& v : y) v = u(rng);
  std::vector<double> ay(15);
  for (std::size_t i = 0; i < y.size(); ++i) ay[i] = 2.0 * y[i] + 0.7;
  auto s1 = smooth(ay, 3);
  auto s2 = smooth(y, 3);
  for (std::size_t i = 0; i < s1.size(); ++i)
    CHECK(s1[i] == doctest::Approx(2.0 * s2[i] + 0.7).epsilon(1e-12));
  // derivatives are linear
  auto d1 = finite_difference(ay, 1, 0.1);
  auto d2 = finite_difference(y, 1, 0.1);
  for (std::size_t i = 0; i < d1.size(); ++i)
    CHECK(d1[i] == doctest::Approx(2.0 * d2[i]).epsilon(1e-10));

  // smoothing before differencing shrinks the white-noise variance:
  // the variance multiplier is the squared tap sum of the composed kernel
  auto bare = derivative_filter(3, 0.02);
  auto smoothed = compose(bare, smoothing_filter(3));
  auto sq = [](const LinearFilter& k) {
    double s = 0.0;
    for (double t : k.taps) s += t * t;
    return s;
  };
  CHECK(sq(smoothed) < 0.2 * sq(bare));

  std::vector<double> se(15, 0.1);
  auto prop = propagate_errors(bare, se);
  for (double v : prop)
    CHECK(v == doctest::Approx(0.1 * std::sqrt(sq(bare))).epsilon(1e-12));
}

TEST_CASE("optimal finite-difference step") {
  CHECK(optimal_step(1e-3, 1.0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(optimal_step(8e-3, 1.0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS(optimal_step(0.0, 1.0));
  CHECK_THROWS(optimal_step(1e-3, 0.0));

  // the returned step minimizes eps/dx + |s3| dx^2 on a fine scan
  const double eps = 2.7e-4, s3 = 1.9;
  const double star = optimal_step(eps, s3);
  auto total = [&](double dx) { return eps / dx + s3 * dx * dx; };
  double best = 1e300, best_dx = 0.0;
  for (double dx = 1e-3; dx < 1.0; dx *= 1.01)
    if (total(dx) < best) {
      best = total(dx);
      best_dx = dx;
    }
  CHECK(star == doctest::Approx(best_dx).epsilon(0.02));
}

namespace {

std::vector<SizeSeries> synthetic_collapse(double pc, double nu, double noise,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise);
  std::vector<SizeSeries> series;
  for (double size : {8.0, 12.0, 16.0, 24.0}) {
    SizeSeries s;
    s.size = size;
    for (double p = 0.02; p <= 0.205; p += 0.005) {
      s.param.push_back(p);
      const double u = (p - pc) * std::pow(size, 1.0 / nu);
      s.value.push_back(std::tanh(u) + gauss(rng));
    }
    series.push_back(std::move(s));
  }
  return series;
}

}  // namespace

TEST_CASE("data collapse recovers synthetic critical parameters") {
  auto clean = synthetic_collapse(0.109, 1.5, 0.0, 1);
  auto fit0 = data_collapse(clean, {}, 0.1, 1.4);
  CHECK(fit0.score < 1e-5);
  CHECK(fit0.critical == doctest::Approx(0.109).epsilon(0.02));

  auto noisy = synthetic_collapse(0.109, 1.5, 0.01, 2);
  auto fit = data_collapse(noisy, {}, 0.1, 1.4);
  CHECK(std::abs(fit.critical - 0.109) < 0.005);
  CHECK(std::abs(fit.exponent - 1.5) < 0.1);

  // score is symmetric under relabeling which size comes first
  std::vector<SizeSeries> shuffled = {noisy[2], noisy[0], noisy[3], noisy[1]};
  CHECK(collapse_score(noisy, 0.109, 1.5, {}) ==
        doctest::Approx(collapse_score(shuffled, 0.109, 1.5, {})).epsilon(1e-12));
}

TEST_CASE("data collapse input validation") {
  auto series = synthetic_collapse(0.109, 1.5, 0.0, 3);
  std::vector<SizeSeries> two(series.begin(), series.begin() + 2);
  CHECK_THROWS(data_collapse(two));
  // a window far away from any data point is degenerate
  CHECK_THROWS(data_collapse(series, CollapseWindow{55.0, 56.0}, 0.1, 1.5));
}
