#include "tlsnoise/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tlsnoise/errors.hpp"

namespace tlsnoise {

double pairwise_sum(std::span<const double> values) {
  const size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double log_trapezoid(std::span<const double> x, std::span<const double> y,
                     double x_lo, double x_hi) {
  if (x.size() != y.size()) throw LengthMismatch("log_trapezoid: x/y size");
  if (!(x_lo < x_hi)) throw EmptyRange("log_trapezoid: x_lo >= x_hi");
  if (x.size() < 2 || x_lo < x.front() || x_hi > x.back())
    throw GridCoverage("log_trapezoid: grid does not cover the interval");

  // Value of y at u = ln(x), linear in u between grid points.
  auto interp = [&](double xq) {
    auto it = std::lower_bound(x.begin(), x.end(), xq);
    size_t i = static_cast<size_t>(it - x.begin());
    if (i == 0) return y[0];
    if (i == x.size()) return y[x.size() - 1];
    if (x[i] == xq) return y[i];
    const double t =
        (std::log(xq) - std::log(x[i - 1])) / (std::log(x[i]) - std::log(x[i - 1]));
    return y[i - 1] + t * (y[i] - y[i - 1]);
  };

  const double y_lo = interp(x_lo);
  const double y_hi = interp(x_hi);

  std::vector<double> terms;
  double prev_x = x_lo, prev_y = y_lo;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= x_lo) continue;
    if (x[i] >= x_hi) break;
    terms.push_back(0.5 * (prev_y + y[i]) * (std::log(x[i]) - std::log(prev_x)));
    prev_x = x[i];
    prev_y = y[i];
  }
  terms.push_back(0.5 * (prev_y + y_hi) * (std::log(x_hi) - std::log(prev_x)));
  return pairwise_sum(terms);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw EmptyRange("percentile: empty sample");
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(rank));
  const size_t hi = static_cast<size_t>(std::ceil(rank));
  const double t = rank - static_cast<double>(lo);
  return values[lo] + t * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return percentile(std::move(values), 0.5); }

namespace {

// Kronrod-15 nodes on [-1,1]; odd-indexed nodes form the embedded Gauss-7 rule.
constexpr double kK15Nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr double kK15Weights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kG7Weights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct GkEstimate {
  double value;
  double error;
};

GkEstimate gk15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double k = 0.0, g = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double fx = f(mid + half * kK15Nodes[i]);
    k += kK15Weights[i] * fx;
    if (i % 2 == 1) g += kG7Weights[i / 2] * fx;
  }
  k *= half;
  g *= half;
  return {k, std::abs(k - g)};
}

double gk_recurse(const std::function<double(double)>& f, double a, double b,
                  double tol, int depth, int max_depth) {
  const GkEstimate e = gk15(f, a, b);
  if (e.error <= tol || e.error <= std::abs(e.value) * 1e-15) return e.value;
  if (depth >= max_depth)
    throw QuadratureFailure("adaptive_gk: refinement cap reached");
  const double mid = 0.5 * (a + b);
  return gk_recurse(f, a, mid, tol * 0.5, depth + 1, max_depth) +
         gk_recurse(f, mid, b, tol * 0.5, depth + 1, max_depth);
}

}  // namespace

double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double rel_tol, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const GkEstimate whole = gk15(f, a, b);
  const double tol = std::max(abs_tol, std::abs(whole.value) * rel_tol);
  if (whole.error <= tol) return whole.value;
  return gk_recurse(f, a, b, tol, 0, max_depth);
}

}  // namespace tlsnoise
