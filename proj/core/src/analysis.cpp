#include "cidlab/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cidlab {

LinearFilter identity_filter() { return LinearFilter{{1.0}}; }

LinearFilter smoothing_filter(int rounds) {
  if (rounds < 0) throw std::invalid_argument("smoothing_filter: negative rounds");
  LinearFilter f = identity_filter();
  const LinearFilter box{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
  for (int r = 0; r < rounds; ++r) f = compose(box, f);
  return f;
}

LinearFilter derivative_filter(int order, double dx) {
  if (dx <= 0.0) throw std::invalid_argument("derivative_filter: dx must be positive");
  switch (order) {
    case 1: return LinearFilter{{-1.0 / (2 * dx), 0.0, 1.0 / (2 * dx)}};
    case 2: return LinearFilter{{1.0 / (dx * dx), -2.0 / (dx * dx), 1.0 / (dx * dx)}};
    case 3: {
      const double h3 = 2.0 * dx * dx * dx;
      return LinearFilter{{-1.0 / h3, 2.0 / h3, 0.0, -2.0 / h3, 1.0 / h3}};
    }
    default: throw std::invalid_argument("derivative_filter: order must be 1, 2 or 3");
  }
}

LinearFilter compose(const LinearFilter& outer, const LinearFilter& inner) {
  LinearFilter out;
  out.taps.assign(outer.taps.size() + inner.taps.size() - 1, 0.0);
  for (std::size_t i = 0; i < outer.taps.size(); ++i)
    for (std::size_t j = 0; j < inner.taps.size(); ++j)
      out.taps[i + j] += outer.taps[i] * inner.taps[j];
  return out;
}

std::vector<double> apply_filter(const LinearFilter& f, std::span<const double> y) {
  const int m = static_cast<int>(f.taps.size());
  if (static_cast<int>(y.size()) < m)
    throw std::invalid_argument("apply_filter: series shorter than the filter support");
  std::vector<double> out(y.size() - m + 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += f.taps[j] * y[i + j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> propagate_errors(const LinearFilter& f, std::span<const double> se) {
  const int m = static_cast<int>(f.taps.size());
  if (static_cast<int>(se.size()) < m)
    throw std::invalid_argument("propagate_errors: series shorter than the filter support");
  std::vector<double> out(se.size() - m + 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += f.taps[j] * f.taps[j] * se[i + j] * se[i + j];
    out[i] = std::sqrt(acc);
  }
  return out;
}

std::vector<double> smooth(std::span<const double> y, int rounds) {
  return apply_filter(smoothing_filter(rounds), y);
}

std::vector<double> finite_difference(std::span<const double> y, int order, double dx) {
  return apply_filter(derivative_filter(order, dx), y);
}

double optimal_step(double epsilon, double s3) {
  if (epsilon <= 0.0 || s3 == 0.0)
    throw std::invalid_argument("optimal_step: inputs must be positive");
  return std::cbrt(epsilon / std::abs(s3));
}

namespace {

/// Linear interpolation of (u, v) at point x; u ascending.  Returns false
/// when x is outside the curve's range.
bool interp(const std::vector<double>& u, const std::vector<double>& v, double x, double& out) {
  if (u.size() < 2 || x < u.front() || x > u.back()) return false;
  auto it = std::lower_bound(u.begin(), u.end(), x);
  if (it == u.begin()) ++it;
  const std::size_t hi = static_cast<std::size_t>(it - u.begin());
  const double t = (x - u[hi - 1]) / (u[hi] - u[hi - 1]);
  out = (1.0 - t) * v[hi - 1] + t * v[hi];
  return true;
}

struct ScaledCurves {
  std::vector<std::vector<double>> u, v;
};

ScaledCurves rescale(std::span<const SizeSeries> series, double critical, double exponent) {
  ScaledCurves c;
  c.u.resize(series.size());
  c.v.resize(series.size());
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double scale = std::pow(series[s].size, 1.0 / exponent);
    c.u[s].reserve(series[s].param.size());
    for (std::size_t i = 0; i < series[s].param.size(); ++i)
      c.u[s].push_back((series[s].param[i] - critical) * scale);
    c.v[s] = series[s].value;
  }
  return c;
}

}  // namespace

double collapse_score(std::span<const SizeSeries> series, double critical, double exponent,
                      const CollapseWindow& window) {
  if (exponent <= 0.05) return std::numeric_limits<double>::max();
  ScaledCurves c = rescale(series, critical, exponent);
  double sum = 0.0;
  long count = 0;
  for (std::size_t a = 0; a < c.u.size(); ++a)
    for (std::size_t i = 0; i < c.u[a].size(); ++i) {
      const double ua = c.u[a][i];
      if (ua < window.lo || ua > window.hi) continue;
      for (std::size_t b = 0; b < c.u.size(); ++b) {
        if (b == a) continue;
        double vb;
        if (!interp(c.u[b], c.v[b], ua, vb)) continue;
        const double d = c.v[a][i] - vb;
        sum += d * d;
        ++count;
      }
    }
  if (count == 0) return std::numeric_limits<double>::max();
  return sum / static_cast<double>(count);
}

CollapseFit data_collapse(std::span<const SizeSeries> series, const CollapseWindow& window,
                          double critical_start, double exponent_start) {
  if (series.size() < 3) throw std::invalid_argument("data_collapse: need at least 3 sizes");
  {
    // Degenerate-window check at the starting point.
    ScaledCurves c = rescale(series, critical_start, exponent_start);
    long inside = 0;
    for (const auto& u : c.u)
      for (double x : u)
        if (x >= window.lo && x <= window.hi) ++inside;
    if (inside < 5)
      throw std::invalid_argument("data_collapse: fewer than 5 points inside the window");
  }

  auto f = [&](double pc, double nu) { return collapse_score(series, pc, nu, window); };

  // Nelder-Mead on (p_c, nu).
  struct Vertex {
    double pc, nu, val;
  };
  std::array<Vertex, 3> simplex{
      Vertex{critical_start, exponent_start, f(critical_start, exponent_start)},
      Vertex{critical_start + 0.01, exponent_start, f(critical_start + 0.01, exponent_start)},
      Vertex{critical_start, exponent_start + 0.2, f(critical_start, exponent_start + 0.2)}};
  auto order = [&] {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.val < b.val; });
  };
  order();
  for (int it = 0; it < 400; ++it) {
    const Vertex& best = simplex[0];
    Vertex& worst = simplex[2];
    const double cpc = (simplex[0].pc + simplex[1].pc) / 2.0;
    const double cnu = (simplex[0].nu + simplex[1].nu) / 2.0;
    Vertex refl{cpc + (cpc - worst.pc), cnu + (cnu - worst.nu), 0.0};
    refl.val = f(refl.pc, refl.nu);
    if (refl.val < best.val) {
      Vertex expd{cpc + 2.0 * (cpc - worst.pc), cnu + 2.0 * (cnu - worst.nu), 0.0};
      expd.val = f(expd.pc, expd.nu);
      worst = expd.val < refl.val ? expd : refl;
    } else if (refl.val < simplex[1].val) {
      worst = refl;
    } else {
      Vertex ctr{cpc + 0.5 * (worst.pc - cpc), cnu + 0.5 * (worst.nu - cnu), 0.0};
      ctr.val = f(ctr.pc, ctr.nu);
      if (ctr.val < worst.val) {
        worst = ctr;
      } else {
        for (int k = 1; k < 3; ++k) {
          simplex[k].pc = best.pc + 0.5 * (simplex[k].pc - best.pc);
          simplex[k].nu = best.nu + 0.5 * (simplex[k].nu - best.nu);
          simplex[k].val = f(simplex[k].pc, simplex[k].nu);
        }
      }
    }
    order();
    if (std::abs(simplex[2].val - simplex[0].val) <
        1e-14 + 1e-10 * std::abs(simplex[0].val))
      break;
  }
  return CollapseFit{simplex[0].pc, simplex[0].nu, simplex[0].val, window};
}

}  // namespace cidlab
