#pragma once

namespace tlsnoise {

// Uniform disc of dipoles: radius R at height h above the qubit plane,
// density N / (pi R^2) on the disc and zero elsewhere.
struct DiscLayer {
  double radius_nm{100.0};
  double height_nm{50.0};
  double total_count{1.0};  // only scales densities, not the integrals below

  void validate() const;
};

enum class LayerOrientation { X, Y, Z, Random };

// Geometric layer integral (nm^-2) for qubits at (-d/2,0,0) and (d/2,0,0):
//   /  x^2 - d^2/4      y^2        h^2  \                dx dy
//   |  -----------  or  ---   or   ---  |  over the disc, with
//   \       D            D          D   /
//   D = [(x+d/2)^2+y^2+h^2]^{3/2} [(x-d/2)^2+y^2+h^2]^{3/2}.
// Random returns (X + Y + Z) / 3 exactly. Adaptive polar quadrature to the
// given relative tolerance; throws QuadratureFailure if unreachable.
double layer_integral(const DiscLayer& layer, double d_nm, LayerOrientation orientation,
                      double rel_tol = 1e-8);

// Closed forms of the same integrals at d = 0.
double layer_integral_closed_form_d0(const DiscLayer& layer, LayerOrientation orientation);

// Separation where the X integral changes sign, by bisection to abs_tol (nm).
// Throws NoBracket when the integral has the same sign at both ends.
double critical_separation(const DiscLayer& layer, double d_min, double d_max,
                           double abs_tol_nm = 0.01);

// Integral of r^-2 from r_c to r_max (1/r_c - 1/r_max): the weight a uniform
// density places near the lower cutoff. r_max may be infinite.
double short_range_divergence_demo(double r_c_nm, double r_max_nm);

}  // namespace tlsnoise
