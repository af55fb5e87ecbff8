#pragma once
#include <cmath>
#include <vector>

#include "tlsnoise/geometry.hpp"

namespace tlsnoise {

struct AxisRange {
  double lo{0.0}, hi{0.0};
  double width() const { return hi - lo; }
};

// Axis-aligned region the TLS positions are drawn from. A range may be
// degenerate (lo == hi), which pins that coordinate.
struct BoxRegion {
  AxisRange x, y, z;
  double area_xy_nm2() const { return x.width() * y.width(); }
};

// One point of the swept model space: everything needed to draw candidate
// configurations and to label the posterior axes.
struct ModelHypothesis {
  int n_tls{1};
  double dipole_length_nm{1.0};  // moment of every dipole, as 1 e * length
  OrientationClass orientation{OrientationClass::FullyRandom};
  BoxRegion layer;
  AxisRange rate_interval_hz{1e-5, 1.0};
  double prior_weight{1.0};
  double epsilon_r{11.0};

  // Count-per-area in cm^-2. Throws DegenerateLayer when the box has no
  // in-plane extent.
  double areal_density_cm2() const;

  // Contract checks. Point-like boxes are legitimate in toy spaces, so
  // callers that require an extended layer pass require_extended_xy = true.
  void validate(bool require_extended_xy = false) const;
};

// Default sweep axes: counts on a 13-point geometric grid from 1 to 177
// rounded to integers with duplicates removed, lengths on a log grid.
std::vector<int> geometric_count_grid(int lo = 1, int hi = 177, int points = 13);
std::vector<double> log_length_grid(double lo_nm, double hi_nm, int points);

}  // namespace tlsnoise
