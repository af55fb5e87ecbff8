#pragma once
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tlsnoise/rng.hpp"

namespace tlsnoise {

// Unit conventions, used throughout the library:
//   lengths in nm, dipole moments in e*nm, rates in Hz, voltages in V.
// The only place SI constants enter is the voltage/field kernels below.

// e / (4 pi eps0) expressed in V*nm^2 so that a moment in e*nm over nm
// distances yields volts directly.
inline constexpr double kCoulombVnm2 = 1.4399645478425672;

// Dipole-site distances below this are treated as coincident and rejected.
inline constexpr double kZeroDistanceNm = 1e-9;

struct Vec3 {
  double x{0.0}, y{0.0}, z{0.0};

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double c) const { return {x * c, y * c, z * c}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const;
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

enum class OrientationClass { FullyRandom, HorizontalRandom, HorizontalX, HorizontalY, VerticalZ };

const char* orientation_name(OrientationClass c);
OrientationClass orientation_from_name(const std::string& name);

// One fluctuating dipole: fixed axis, moment p (e*nm), telegraph state s = +-1
// flipping as a Poisson process at switch_rate per direction. The state
// autocorrelation is exp(-2*rate*|t|), so the relaxation time used by the
// spectra is tau = 1 / (2 * switch_rate).
struct Tls {
  Vec3 position;      // nm
  Vec3 orientation;   // unit vector
  double moment_e_nm{1.0};
  double switch_rate_hz{1.0};

  double tau_s() const { return 1.0 / (2.0 * switch_rate_hz); }
  void validate() const;
};

struct TlsConfiguration {
  std::vector<Tls> tls;
  double epsilon_r{11.0};

  void validate() const;  // non-empty, epsilon_r > 0, each TLS valid
};

// Qubit sites, all in the z = 0 plane.
struct QubitLayout {
  std::vector<Vec3> sites;  // nm

  void validate() const;  // z == 0, non-empty, pairwise distinct
};

// Potential at `site` per unit telegraph state, in volts.
double voltage_kernel(const Tls& tls, const Vec3& site, double epsilon_r);

// Gradient of voltage_kernel with respect to the site coordinate, in V/nm.
// The physical field is the negative of this; every spectral quantity uses
// products of two kernels, so the overall sign drops out.
Vec3 field_kernel(const Tls& tls, const Vec3& site, double epsilon_r);

// Orientation-weighted inverse-cube geometry factor between two sites, nm^-4:
//   [p_m . (r_m - R1)] [p_n . (r_n - R2)] / (|r_m - R1|^3 |r_n - R2|^3)
double geometry_matrix_element(const Tls& m, const Tls& n, const Vec3& site1,
                               const Vec3& site2);

// One unit orientation drawn from the class prior. FullyRandom uses
// inverse-CDF sampling of cos(theta) on [-1,1]; the axis classes are
// deterministic.
Vec3 sample_orientation(OrientationClass cls, Rng& rng);

struct ModelHypothesis;  // inference/hypothesis.hpp

// Draw a configuration from a hypothesis prior: positions uniform in the
// layer box, orientations per class, switching rates log-uniform over the
// rate interval. TLS i consumes the substream (seed, i), so a given TLS's
// draw does not depend on how many follow it.
TlsConfiguration sample_configuration(const ModelHypothesis& hypothesis,
                                      uint64_t rng_seed);

}  // namespace tlsnoise
