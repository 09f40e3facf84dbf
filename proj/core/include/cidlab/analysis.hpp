#pragma once

#include <span>
#include <vector>

namespace cidlab {

/// Centered linear filter over a uniformly spaced series; applying it shrinks
/// the domain by (taps.size()-1)/2 points per side.
struct LinearFilter {
  std::vector<double> taps;  // odd length

  int radius() const { return (static_cast<int>(taps.size()) - 1) / 2; }
};

LinearFilter identity_filter();
/// r rounds of the three-point mean [1,1,1]/3.
LinearFilter smoothing_filter(int rounds);
/// Second-order central stencils for derivative orders 1, 2, 3 at spacing dx.
LinearFilter derivative_filter(int order, double dx);
LinearFilter compose(const LinearFilter& outer, const LinearFilter& inner);

std::vector<double> apply_filter(const LinearFilter& f, std::span<const double> y);
/// Standard errors of the filtered series assuming independent input errors.
std::vector<double> propagate_errors(const LinearFilter& f, std::span<const double> se);

/// r rounds of the local three-point average; each round shrinks the domain
/// by one point per side (no padding).
std::vector<double> smooth(std::span<const double> y, int rounds);

/// Central finite difference of order k in {1,2,3} at uniform spacing dx.
std::vector<double> finite_difference(std::span<const double> y, int order, double dx);

/// Optimal finite-difference step (epsilon / |s3|)^(1/3) from the total-error
/// model epsilon/step + |s3| step^2.
double optimal_step(double epsilon, double s3);

// --- finite-size data collapse ------------------------------------------------

struct SizeSeries {
  double size = 0.0;                 // linear system size L
  std::vector<double> param, value;  // tuning parameter (ascending) and observable
};

struct CollapseWindow {
  double lo = -0.4;
  double hi = 0.4;
};

struct CollapseFit {
  double critical = 0.0;  // p_c (or equivalent)
  double exponent = 0.0;  // nu
  double score = 0.0;     // mean squared deviation from the master curve
  CollapseWindow window;
};

/// Collapse quality at fixed (critical, nu): each in-window point is compared
/// against the linear interpolation of every other size's curve in the scaled
/// variable u = (p - critical) L^(1/nu); symmetric over sizes.
double collapse_score(std::span<const SizeSeries> series, double critical, double exponent,
                      const CollapseWindow& window);

/// Derivative-free (Nelder-Mead) minimization of the collapse score from the
/// given starting point.  Throws when fewer than five points fall inside the
/// window at the start.
CollapseFit data_collapse(std::span<const SizeSeries> series, const CollapseWindow& window = {},
                          double critical_start = 0.1, double exponent_start = 1.5);

}  // namespace cidlab
