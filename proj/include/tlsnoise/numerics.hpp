#pragma once
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tlsnoise {

// Fixed-tree pairwise summation. The reduction order depends only on the
// element count, so parallel producers that fill the buffer in any order
// still reduce to bit-identical totals.
double pairwise_sum(std::span<const double> values);

// Trapezoid integral of y against ln(x) over [x_lo, x_hi]. The x grid must be
// strictly increasing and must cover the interval; endpoint values are
// linearly interpolated in ln(x).
double log_trapezoid(std::span<const double> x, std::span<const double> y,
                     double x_lo, double x_hi);

// Percentile with linear interpolation between closest ranks, q in [0,1].
double percentile(std::vector<double> values, double q);

double median(std::vector<double> values);

// Adaptive Gauss-Kronrod (G7,K15) quadrature of f over [a,b].
// Bisects until the local error estimate meets the tolerance or the depth cap
// is hit, in which case it throws QuadratureFailure.
double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double rel_tol, double abs_tol, int max_depth = 30);

}  // namespace tlsnoise
