#include "tlsnoise/telegraph.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>

#include "tlsnoise/errors.hpp"
#include "tlsnoise/numerics.hpp"
#include "tlsnoise/rng.hpp"

namespace tlsnoise {

size_t TimeSeriesSpec::n_samples() const {
  return static_cast<size_t>(std::llround(duration_s / sample_interval_s));
}

void TimeSeriesSpec::validate() const {
  if (!(sample_interval_s > 0.0)) throw ValidationError("sample interval must be > 0");
  if (n_realizations < 1) throw ValidationError("need n_realizations >= 1");
  const double ratio = duration_s / sample_interval_s;
  const double rounded = std::llround(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw ValidationError("duration must be an integer number of samples");
  const size_t n = n_samples();
  if (n < 2 || n % 2 != 0)
    throw ValidationError("sample count must be even and >= 2");
}

std::vector<int8_t> simulate_telegraph(const Tls& tls, const TimeSeriesSpec& spec,
                                       int tls_index, int realization) {
  spec.validate();
  tls.validate();
  Rng stream = Rng::derive(spec.rng_seed, {static_cast<uint64_t>(tls_index),
                                           static_cast<uint64_t>(realization)});
  const size_t n = spec.n_samples();
  std::vector<int8_t> s(n);
  int8_t state = stream.coin() ? 1 : -1;
  double t_next = stream.exponential(tls.switch_rate_hz);
  for (size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * spec.sample_interval_s;
    while (t_next <= t) {
      state = -state;
      t_next += stream.exponential(tls.switch_rate_hz);
    }
    s[k] = state;
  }
  return s;
}

std::vector<std::vector<std::vector<double>>> synthesize_qubit_records(
    const TlsConfiguration& config, const QubitLayout& layout, Observable obs,
    const TimeSeriesSpec& spec) {
  spec.validate();
  config.validate();
  if (layout.sites.empty()) throw ValidationError("layout has no sites");

  const size_t n = spec.n_samples();
  const size_t n_sites = layout.sites.size();
  std::vector<std::vector<std::vector<double>>> records(
      n_sites, std::vector<std::vector<double>>(
                   spec.n_realizations, std::vector<double>(n, 0.0)));

  std::vector<std::vector<double>> kernels(n_sites, std::vector<double>(config.tls.size()));
  for (size_t s = 0; s < n_sites; ++s)
    for (size_t m = 0; m < config.tls.size(); ++m)
      kernels[s][m] =
          observable_kernel(config.tls[m], layout.sites[s], config.epsilon_r, obs);

  for (int r = 0; r < spec.n_realizations; ++r) {
    for (size_t m = 0; m < config.tls.size(); ++m) {
      const std::vector<int8_t> s =
          simulate_telegraph(config.tls[m], spec, static_cast<int>(m), r);
      for (size_t site = 0; site < n_sites; ++site) {
        const double k = kernels[site][m];
        double* dst = records[site][static_cast<size_t>(r)].data();
        for (size_t i = 0; i < n; ++i) dst[i] += k * s[i];
      }
    }
  }
  return records;
}

namespace {

// Forward r2c FFT of one record. Output has n/2 + 1 bins.
std::vector<std::complex<double>> rfft(const std::vector<double>& record) {
  const size_t n = record.size();
  std::vector<double> in(record);
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(
      static_cast<int>(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()),
      FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  return out;
}

FrequencyGrid fft_grid(size_t n, double dt) {
  FrequencyGrid grid;
  grid.values.resize(n / 2);
  for (size_t k = 1; k <= n / 2; ++k)
    grid.values[k - 1] = static_cast<double>(k) / (static_cast<double>(n) * dt);
  return grid;
}

void check_realizations(const std::vector<std::vector<double>>& recs,
                        const TimeSeriesSpec& spec) {
  if (recs.size() != static_cast<size_t>(spec.n_realizations))
    throw LengthMismatch("realization count does not match the spec");
  for (const auto& r : recs)
    if (r.size() != spec.n_samples())
      throw LengthMismatch("record length does not match the spec");
}

}  // namespace

EstimatedSpectrum estimate_psd(const std::vector<std::vector<double>>& realizations,
                               const TimeSeriesSpec& spec) {
  spec.validate();
  check_realizations(realizations, spec);
  const size_t n = spec.n_samples();
  const double dt = spec.sample_interval_s;

  EstimatedSpectrum est;
  est.grid = fft_grid(n, dt);
  est.n_realizations = spec.n_realizations;
  est.bin_width_hz = 1.0 / (static_cast<double>(n) * dt);
  est.apsd.assign(n / 2, 0.0);

  // One-sided periodogram: interior bins carry the factor 2, the Nyquist
  // bin and DC do not. The averages reduce in realization order.
  const double scale = dt / static_cast<double>(n);
  for (const auto& rec : realizations) {
    const auto spec_bins = rfft(rec);
    est.dc_power += scale * std::norm(spec_bins[0]);
    for (size_t k = 1; k <= n / 2; ++k) {
      const double one_sided = (k < n / 2) ? 2.0 : 1.0;
      est.apsd[k - 1] += one_sided * scale * std::norm(spec_bins[k]);
    }
  }
  const double inv_r = 1.0 / spec.n_realizations;
  est.dc_power *= inv_r;
  for (double& v : est.apsd) v *= inv_r;
  return est;
}

EstimatedSpectrum estimate_cpsd(const std::vector<std::vector<double>>& site_a,
                                const std::vector<std::vector<double>>& site_b,
                                const TimeSeriesSpec& spec) {
  spec.validate();
  check_realizations(site_a, spec);
  check_realizations(site_b, spec);
  const size_t n = spec.n_samples();
  const double dt = spec.sample_interval_s;

  EstimatedSpectrum est;
  est.grid = fft_grid(n, dt);
  est.n_realizations = spec.n_realizations;
  est.bin_width_hz = 1.0 / (static_cast<double>(n) * dt);
  est.cpsd.assign(n / 2, {0.0, 0.0});

  const double scale = dt / static_cast<double>(n);
  for (size_t r = 0; r < site_a.size(); ++r) {
    const auto fa = rfft(site_a[r]);
    const auto fb = rfft(site_b[r]);
    est.dc_power += scale * (fa[0] * std::conj(fb[0])).real();
    for (size_t k = 1; k <= n / 2; ++k) {
      const double one_sided = (k < n / 2) ? 2.0 : 1.0;
      est.cpsd[k - 1] += one_sided * scale * fa[k] * std::conj(fb[k]);
    }
  }
  const double inv_r = 1.0 / spec.n_realizations;
  est.dc_power *= inv_r;
  for (auto& v : est.cpsd) v *= inv_r;
  return est;
}

double EstimatedSpectrum::integral_with_dc() const {
  std::vector<double> terms;
  terms.reserve(apsd.size() + 1);
  terms.push_back(dc_power);
  for (double v : apsd) terms.push_back(v);
  return bin_width_hz * pairwise_sum(terms);
}

CrossSpectrum normalized_cpsd(const EstimatedSpectrum& cross,
                              const EstimatedSpectrum& auto_a,
                              const EstimatedSpectrum& auto_b) {
  const size_t n = cross.cpsd.size();
  if (auto_a.apsd.size() != n || auto_b.apsd.size() != n)
    throw LengthMismatch("cross and auto estimates use different grids");

  CrossSpectrum out;
  out.grid = cross.grid;
  out.origin = SpectrumOrigin::Estimated;
  out.values = cross.cpsd;
  out.normalized.resize(n);
  out.phase.resize(n);
  out.strength.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const double denom = auto_a.apsd[i] * auto_b.apsd[i];
    if (denom <= 0.0)
      throw DegenerateSpectrum("an estimated APSD vanishes; CPSD undefined");
    const std::complex<double> c = cross.cpsd[i] / std::sqrt(denom);
    out.normalized[i] = c;
    out.phase[i] = std::atan2(c.imag(), c.real());
    out.strength[i] = std::abs(c);
  }
  return out;
}

}  // namespace tlsnoise
