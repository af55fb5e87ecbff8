#include "tlsnoise/continuum.hpp"

#include <cmath>
#include <numbers>

#include "tlsnoise/errors.hpp"
#include "tlsnoise/numerics.hpp"

namespace tlsnoise {

void DiscLayer::validate() const {
  if (!(radius_nm > 0.0)) throw ValidationError("disc radius must be > 0");
  if (!(height_nm > 0.0)) throw ValidationError("disc height must be > 0");
}

namespace {

double integrand_numerator(LayerOrientation o, double x, double y, double d, double h) {
  switch (o) {
    case LayerOrientation::X: return x * x - 0.25 * d * d;
    case LayerOrientation::Y: return y * y;
    case LayerOrientation::Z: return h * h;
    case LayerOrientation::Random: break;
  }
  throw ValidationError("Random orientation handled by the caller");
}

}  // namespace

double layer_integral(const DiscLayer& layer, double d_nm, LayerOrientation orientation,
                      double rel_tol) {
  layer.validate();
  if (d_nm < 0.0) throw ValidationError("separation must be >= 0");

  if (orientation == LayerOrientation::Random) {
    return (layer_integral(layer, d_nm, LayerOrientation::X, rel_tol) +
            layer_integral(layer, d_nm, LayerOrientation::Y, rel_tol) +
            layer_integral(layer, d_nm, LayerOrientation::Z, rel_tol)) /
           3.0;
  }

  const double h = layer.height_nm;
  const double d = d_nm;

  // Polar grid about the disc center; integrands are even in both x and y,
  // so one quadrant times four. h > 0 keeps the denominator smooth.
  auto point = [&](double rho, double phi) {
    const double x = rho * std::cos(phi);
    const double y = rho * std::sin(phi);
    const double a = (x + 0.5 * d) * (x + 0.5 * d) + y * y + h * h;
    const double b = (x - 0.5 * d) * (x - 0.5 * d) + y * y + h * h;
    const double denom = std::pow(a, 1.5) * std::pow(b, 1.5);
    return integrand_numerator(orientation, x, y, d, h) / denom * rho;
  };

  // Scale for the absolute-tolerance floor: the Z integrand bounds them all.
  const double scale =
      std::numbers::pi * layer.radius_nm * layer.radius_nm / (h * h * h * h);

  auto outer = [&](double rho) {
    return adaptive_gk([&](double phi) { return point(rho, phi); }, 0.0,
                       0.5 * std::numbers::pi, rel_tol * 0.1, scale * rel_tol * 1e-3);
  };
  const double quadrant =
      adaptive_gk(outer, 0.0, layer.radius_nm, rel_tol, scale * rel_tol * 1e-2);
  return 4.0 * quadrant;
}

double layer_integral_closed_form_d0(const DiscLayer& layer, LayerOrientation orientation) {
  layer.validate();
  const double h2 = layer.height_nm * layer.height_nm;
  const double R2 = layer.radius_nm * layer.radius_nm;
  const double R4 = R2 * R2;
  const double s2 = (h2 + R2) * (h2 + R2);
  switch (orientation) {
    case LayerOrientation::X:
    case LayerOrientation::Y:
      return std::numbers::pi / (4.0 * h2) * R4 / s2;
    case LayerOrientation::Z:
      return std::numbers::pi / (2.0 * h2) * (R4 + 2.0 * h2 * R2) / s2;
    case LayerOrientation::Random:
      return std::numbers::pi / (3.0 * h2) * (R4 + h2 * R2) / s2;
  }
  throw ValidationError("unknown layer orientation");
}

double critical_separation(const DiscLayer& layer, double d_min, double d_max,
                           double abs_tol_nm) {
  if (!(d_min >= 0.0) || !(d_min < d_max))
    throw InvalidRange("critical_separation: need 0 <= d_min < d_max");
  double lo = d_min, hi = d_max;
  double f_lo = layer_integral(layer, lo, LayerOrientation::X);
  const double f_hi = layer_integral(layer, hi, LayerOrientation::X);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0))
    throw NoBracket("the X layer integral has the same sign at both bracket ends");

  while (hi - lo > abs_tol_nm) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = layer_integral(layer, mid, LayerOrientation::X);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double short_range_divergence_demo(double r_c_nm, double r_max_nm) {
  if (!(r_c_nm > 0.0) || !(r_c_nm <= r_max_nm))
    throw InvalidRange("need 0 < r_c <= r_max");
  return 1.0 / r_c_nm - 1.0 / r_max_nm;  // r_max may be +inf
}

}  // namespace tlsnoise
