#include "tlsnoise/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tlsnoise/errors.hpp"
#include "tlsnoise/numerics.hpp"

namespace tlsnoise {

FrequencyGrid FrequencyGrid::log_spaced(double f_min, double f_max, int points) {
  if (!(f_min > 0.0) || !(f_max > f_min) || points < 2)
    throw ValidationError("log_spaced grid needs 0 < f_min < f_max, >= 2 points");
  FrequencyGrid g;
  g.values.resize(points);
  const double step = std::log(f_max / f_min) / (points - 1);
  for (int i = 0; i < points; ++i) g.values[i] = f_min * std::exp(step * i);
  g.values.back() = f_max;
  return g;
}

void FrequencyGrid::validate() const {
  if (values.empty()) throw ValidationError("frequency grid is empty");
  double prev = 0.0;
  for (double f : values) {
    if (!std::isfinite(f) || f <= prev)
      throw ValidationError("frequency grid must be positive, finite, strictly increasing");
    prev = f;
  }
}

const char* observable_name(Observable o) {
  switch (o) {
    case Observable::Voltage: return "voltage";
    case Observable::FieldX: return "ex";
    case Observable::FieldY: return "ey";
    case Observable::FieldZ: return "ez";
  }
  throw ValidationError("unknown observable");
}

Observable observable_from_name(const std::string& name) {
  if (name == "voltage") return Observable::Voltage;
  if (name == "ex") return Observable::FieldX;
  if (name == "ey") return Observable::FieldY;
  if (name == "ez") return Observable::FieldZ;
  throw ValidationError("unknown observable: " + name);
}

double observable_kernel(const Tls& tls, const Vec3& site, double epsilon_r,
                         Observable obs) {
  switch (obs) {
    case Observable::Voltage: return voltage_kernel(tls, site, epsilon_r);
    case Observable::FieldX: return field_kernel(tls, site, epsilon_r).x;
    case Observable::FieldY: return field_kernel(tls, site, epsilon_r).y;
    case Observable::FieldZ: return field_kernel(tls, site, epsilon_r).z;
  }
  throw ValidationError("unknown observable");
}

double lorentzian_psd(double f_hz, double tau_s) {
  const double w = 2.0 * std::numbers::pi * f_hz * tau_s;
  return 4.0 * tau_s / (1.0 + w * w);
}

namespace {

void check_site(const QubitLayout& layout, int site) {
  if (site < 0 || static_cast<size_t>(site) >= layout.sites.size())
    throw ValidationError("site index out of range");
}

}  // namespace

SpectrumSeries analytic_apsd(const TlsConfiguration& config, const QubitLayout& layout,
                             int site, Observable obs, const FrequencyGrid& grid) {
  config.validate();
  grid.validate();
  check_site(layout, site);

  const size_t n_tls = config.tls.size();
  std::vector<double> k(n_tls);
  for (size_t n = 0; n < n_tls; ++n)
    k[n] = observable_kernel(config.tls[n], layout.sites[site], config.epsilon_r, obs);

  SpectrumSeries out;
  out.grid = grid;
  out.observable = obs;
  out.site_index = site;
  out.values.resize(grid.size());
  std::vector<double> terms(n_tls);
  for (size_t i = 0; i < grid.size(); ++i) {
    for (size_t n = 0; n < n_tls; ++n)
      terms[n] = k[n] * k[n] * lorentzian_psd(grid.values[i], config.tls[n].tau_s());
    out.values[i] = pairwise_sum(terms);
  }
  return out;
}

std::vector<double> analytic_cpsd_values(const TlsConfiguration& config,
                                         const QubitLayout& layout, int site_a,
                                         int site_b, Observable obs,
                                         const FrequencyGrid& grid) {
  config.validate();
  grid.validate();
  check_site(layout, site_a);
  check_site(layout, site_b);

  const size_t n_tls = config.tls.size();
  std::vector<double> ka(n_tls), kb(n_tls);
  for (size_t n = 0; n < n_tls; ++n) {
    ka[n] = observable_kernel(config.tls[n], layout.sites[site_a], config.epsilon_r, obs);
    kb[n] = observable_kernel(config.tls[n], layout.sites[site_b], config.epsilon_r, obs);
  }

  std::vector<double> s12(grid.size());
  std::vector<double> terms(n_tls);
  for (size_t i = 0; i < grid.size(); ++i) {
    for (size_t n = 0; n < n_tls; ++n)
      terms[n] = ka[n] * kb[n] * lorentzian_psd(grid.values[i], config.tls[n].tau_s());
    s12[i] = pairwise_sum(terms);
  }
  return s12;
}

CrossSpectrum analytic_cpsd(const TlsConfiguration& config, const QubitLayout& layout,
                            int site_a, int site_b, Observable obs,
                            const FrequencyGrid& grid) {
  if (site_a == site_b) throw ValidationError("analytic_cpsd needs two distinct site indices");
  const std::vector<double> s12 = analytic_cpsd_values(config, layout, site_a, site_b, obs, grid);
  const SpectrumSeries sa = analytic_apsd(config, layout, site_a, obs, grid);
  const SpectrumSeries sb = analytic_apsd(config, layout, site_b, obs, grid);

  CrossSpectrum out;
  out.grid = grid;
  out.origin = SpectrumOrigin::Analytic;
  out.values.resize(grid.size());
  out.normalized.resize(grid.size());
  out.phase.resize(grid.size());
  out.strength.resize(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const double denom = sa.values[i] * sb.values[i];
    if (denom <= 0.0)
      throw DegenerateSpectrum("an APSD vanishes at a grid frequency; CPSD undefined");
    out.values[i] = {s12[i], 0.0};
    const double c = s12[i] / std::sqrt(denom);
    out.normalized[i] = {c, 0.0};
    out.phase[i] = s12[i] >= 0.0 ? 0.0 : std::numbers::pi;
    out.strength[i] = std::abs(c);
  }
  return out;
}

namespace {

// 1 when the phase classifies as 0 (nearer 0 than pi on the circle), else 0.
double zero_indicator(double phase) {
  return std::cos(phase) >= 0.0 ? 1.0 : 0.0;
}

}  // namespace

PhasePercentages weighted_phase_percentages(const CrossSpectrum& cross, double f_lo,
                                            double f_hi) {
  cross.grid.validate();
  if (!(f_lo < f_hi)) throw EmptyRange("weighted_phase_percentages: f_lo >= f_hi");
  if (f_lo < cross.grid.values.front() || f_hi > cross.grid.values.back())
    throw GridCoverage("weighted_phase_percentages: band outside the grid");

  std::vector<double> indicator(cross.phase.size());
  for (size_t i = 0; i < cross.phase.size(); ++i)
    indicator[i] = zero_indicator(cross.phase[i]);

  const double total = std::log(f_hi / f_lo);
  const double zero_mass =
      log_trapezoid(cross.grid.values, indicator, f_lo, f_hi);
  const double pct_zero = 100.0 * zero_mass / total;
  return {pct_zero, 100.0 - pct_zero};
}

std::vector<OrientationStats> orientation_ensemble_stats(
    const EnsembleSpec& spec, int n_samples, uint64_t rng_seed,
    const FrequencyGrid& grid, const std::vector<double>& strength_freqs_hz) {
  if (n_samples < 1) throw ValidationError("ensemble needs n_samples >= 1");
  if (spec.layout.sites.size() != 2)
    throw ValidationError("ensemble stats use exactly two sites");
  grid.validate();

  // Strength is read off the nearest grid point to each listed frequency.
  std::vector<size_t> strength_idx;
  for (double f : strength_freqs_hz) {
    size_t best = 0;
    double best_err = std::abs(std::log(grid.values[0] / f));
    for (size_t i = 1; i < grid.size(); ++i) {
      const double err = std::abs(std::log(grid.values[i] / f));
      if (err < best_err) {
        best = i;
        best_err = err;
      }
    }
    strength_idx.push_back(best);
  }

  constexpr OrientationClass kClasses[] = {
      OrientationClass::FullyRandom, OrientationClass::HorizontalRandom,
      OrientationClass::HorizontalX, OrientationClass::HorizontalY,
      OrientationClass::VerticalZ};

  std::vector<OrientationStats> out;
  for (OrientationClass cls : kClasses) {
    ModelHypothesis hyp;
    hyp.n_tls = spec.n_tls;
    hyp.dipole_length_nm = spec.moment_e_nm;
    hyp.orientation = cls;
    hyp.layer = spec.layer;
    hyp.rate_interval_hz = spec.rate_interval_hz;
    hyp.epsilon_r = spec.epsilon_r;

    std::vector<double> pct_zero, pct_pi, strengths;
    for (int s = 0; s < n_samples; ++s) {
      Rng stream = Rng::derive(rng_seed, {static_cast<uint64_t>(cls), static_cast<uint64_t>(s)});
      const uint64_t sample_seed = stream.next_u64();
      const TlsConfiguration config = sample_configuration(hyp, sample_seed);
      const CrossSpectrum cross =
          analytic_cpsd(config, spec.layout, 0, 1, spec.observable, grid);
      const PhasePercentages pct =
          weighted_phase_percentages(cross, spec.f_lo_hz, spec.f_hi_hz);
      pct_zero.push_back(pct.pct_zero);
      pct_pi.push_back(pct.pct_pi);
      for (size_t idx : strength_idx) strengths.push_back(cross.strength[idx]);
    }

    OrientationStats stats;
    stats.orientation = cls;
    stats.median_pct_zero = median(pct_zero);
    stats.q1_pct_zero = percentile(pct_zero, 0.25);
    stats.q3_pct_zero = percentile(pct_zero, 0.75);
    stats.median_pct_pi = median(pct_pi);
    stats.q1_pct_pi = percentile(pct_pi, 0.25);
    stats.q3_pct_pi = percentile(pct_pi, 0.75);
    const double mean = pairwise_sum(strengths) / strengths.size();
    double var = 0.0;
    for (double v : strengths) var += (v - mean) * (v - mean);
    stats.strength_mean = mean;
    stats.strength_std = strengths.size() > 1
                             ? std::sqrt(var / (strengths.size() - 1))
                             : 0.0;
    out.push_back(stats);
  }
  return out;
}

}  // namespace tlsnoise
