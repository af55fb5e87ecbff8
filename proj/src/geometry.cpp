#include "tlsnoise/geometry.hpp"

#include <cmath>
#include <numbers>

#include "tlsnoise/errors.hpp"
#include "tlsnoise/hypothesis.hpp"

namespace tlsnoise {

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (n == 0.0) throw ValidationError("cannot normalize a zero vector");
  return {x / n, y / n, z / n};
}

const char* orientation_name(OrientationClass c) {
  switch (c) {
    case OrientationClass::FullyRandom: return "fully-random";
    case OrientationClass::HorizontalRandom: return "hor-random";
    case OrientationClass::HorizontalX: return "hor-x";
    case OrientationClass::HorizontalY: return "hor-y";
    case OrientationClass::VerticalZ: return "ver-z";
  }
  throw ValidationError("unknown orientation class");
}

OrientationClass orientation_from_name(const std::string& name) {
  if (name == "fully-random") return OrientationClass::FullyRandom;
  if (name == "hor-random") return OrientationClass::HorizontalRandom;
  if (name == "hor-x") return OrientationClass::HorizontalX;
  if (name == "hor-y") return OrientationClass::HorizontalY;
  if (name == "ver-z") return OrientationClass::VerticalZ;
  throw ValidationError("unknown orientation class: " + name);
}

void Tls::validate() const {
  if (!position.finite() || !orientation.finite())
    throw ValidationError("TLS has non-finite components");
  if (std::abs(orientation.norm() - 1.0) > 1e-12)
    throw ValidationError("TLS orientation is not unit-norm");
  if (!(moment_e_nm > 0.0)) throw ValidationError("TLS moment must be > 0");
  if (!(switch_rate_hz > 0.0)) throw ValidationError("TLS switch rate must be > 0");
}

void TlsConfiguration::validate() const {
  if (tls.empty()) throw ValidationError("configuration has no TLS");
  if (!(epsilon_r > 0.0)) throw ValidationError("epsilon_r must be > 0");
  for (const Tls& t : tls) t.validate();
}

void QubitLayout::validate() const {
  if (sites.empty()) throw ValidationError("layout has no sites");
  for (const Vec3& s : sites) {
    if (!s.finite()) throw ValidationError("site has non-finite components");
    if (s.z != 0.0) throw ValidationError("qubit sites must have z = 0");
  }
  for (size_t i = 0; i < sites.size(); ++i)
    for (size_t j = i + 1; j < sites.size(); ++j)
      if ((sites[i] - sites[j]).norm() == 0.0)
        throw ValidationError("qubit sites must be pairwise distinct");
}

namespace {

Vec3 separation_checked(const Tls& tls, const Vec3& site) {
  const Vec3 d = tls.position - site;
  if (d.norm() < kZeroDistanceNm)
    throw ZeroDistance("TLS coincides with an observation site");
  return d;
}

}  // namespace

double voltage_kernel(const Tls& tls, const Vec3& site, double epsilon_r) {
  const Vec3 d = separation_checked(tls, site);
  const double r = d.norm();
  return -(kCoulombVnm2 / epsilon_r) * tls.moment_e_nm * tls.orientation.dot(d) /
         (r * r * r);
}

Vec3 field_kernel(const Tls& tls, const Vec3& site, double epsilon_r) {
  const Vec3 d = separation_checked(tls, site);
  const double r = d.norm();
  const double r3 = r * r * r;
  const double r5 = r3 * r * r;
  const double pd = tls.orientation.dot(d);
  const double c = kCoulombVnm2 / epsilon_r * tls.moment_e_nm;
  // grad_R of -c * (p.(r-R)) / |r-R|^3
  return tls.orientation * (c / r3) - d * (3.0 * c * pd / r5);
}

double geometry_matrix_element(const Tls& m, const Tls& n, const Vec3& site1,
                               const Vec3& site2) {
  const Vec3 dm = separation_checked(m, site1);
  const Vec3 dn = separation_checked(n, site2);
  const double rm = dm.norm();
  const double rn = dn.norm();
  return m.orientation.dot(dm) * n.orientation.dot(dn) /
         ((rm * rm * rm) * (rn * rn * rn));
}

Vec3 sample_orientation(OrientationClass cls, Rng& rng) {
  switch (cls) {
    case OrientationClass::FullyRandom: {
      const double cos_theta = rng.uniform(-1.0, 1.0);
      const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      return {sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta};
    }
    case OrientationClass::HorizontalRandom: {
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      return {std::cos(phi), std::sin(phi), 0.0};
    }
    case OrientationClass::HorizontalX: return {1.0, 0.0, 0.0};
    case OrientationClass::HorizontalY: return {0.0, 1.0, 0.0};
    case OrientationClass::VerticalZ: return {0.0, 0.0, 1.0};
  }
  throw ValidationError("unknown orientation class");
}

namespace {

double sample_axis(const AxisRange& r, Rng& rng) {
  if (r.lo == r.hi) return r.lo;
  return rng.uniform(r.lo, r.hi);
}

}  // namespace

TlsConfiguration sample_configuration(const ModelHypothesis& hypothesis,
                                      uint64_t rng_seed) {
  hypothesis.validate();
  TlsConfiguration config;
  config.epsilon_r = hypothesis.epsilon_r;
  config.tls.reserve(static_cast<size_t>(hypothesis.n_tls));
  for (int i = 0; i < hypothesis.n_tls; ++i) {
    Rng stream = Rng::derive(rng_seed, {static_cast<uint64_t>(i)});
    Tls t;
    t.position = {sample_axis(hypothesis.layer.x, stream),
                  sample_axis(hypothesis.layer.y, stream),
                  sample_axis(hypothesis.layer.z, stream)};
    t.orientation = sample_orientation(hypothesis.orientation, stream);
    t.moment_e_nm = hypothesis.dipole_length_nm;
    t.switch_rate_hz =
        stream.log_uniform(hypothesis.rate_interval_hz.lo, hypothesis.rate_interval_hz.hi);
    config.tls.push_back(t);
  }
  return config;
}

double ModelHypothesis::areal_density_cm2() const {
  const double area_nm2 = layer.area_xy_nm2();
  if (area_nm2 <= 0.0)
    throw DegenerateLayer("layer box has zero in-plane area; density undefined");
  return static_cast<double>(n_tls) / (area_nm2 * 1e-14);  // nm^2 -> cm^2
}

void ModelHypothesis::validate(bool require_extended_xy) const {
  if (n_tls < 1) throw ValidationError("hypothesis needs n_tls >= 1");
  if (!(dipole_length_nm > 0.0)) throw ValidationError("dipole length must be > 0");
  if (!(prior_weight >= 0.0 && prior_weight <= 1.0))
    throw ValidationError("prior weight must lie in [0,1]");
  if (!(rate_interval_hz.lo > 0.0) || rate_interval_hz.lo > rate_interval_hz.hi)
    throw ValidationError("rate interval must be positive and ordered");
  if (!(epsilon_r > 0.0)) throw ValidationError("epsilon_r must be > 0");
  for (const AxisRange* r : {&layer.x, &layer.y, &layer.z})
    if (!(r->lo <= r->hi) || !std::isfinite(r->lo) || !std::isfinite(r->hi))
      throw ValidationError("layer box ranges must be finite and ordered");
  if (require_extended_xy && layer.area_xy_nm2() <= 0.0)
    throw DegenerateLayer("layer box must be extended in x and y");
}

std::vector<int> geometric_count_grid(int lo, int hi, int points) {
  if (lo < 1 || hi < lo || points < 2)
    throw ValidationError("count grid needs 1 <= lo <= hi and >= 2 points");
  std::vector<int> grid;
  const double ratio = std::log(static_cast<double>(hi) / lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    const int n = static_cast<int>(std::lround(lo * std::exp(ratio * i)));
    if (grid.empty() || grid.back() != n) grid.push_back(n);
  }
  return grid;
}

std::vector<double> log_length_grid(double lo_nm, double hi_nm, int points) {
  if (!(lo_nm > 0.0) || !(hi_nm > lo_nm) || points < 2)
    throw ValidationError("length grid needs 0 < lo < hi and >= 2 points");
  std::vector<double> grid(points);
  const double step = std::log(hi_nm / lo_nm) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = lo_nm * std::exp(step * i);
  return grid;
}

}  // namespace tlsnoise
