#pragma once
#include <complex>
#include <cstdint>
#include <vector>

#include "tlsnoise/geometry.hpp"
#include "tlsnoise/spectra.hpp"

namespace tlsnoise {

struct TimeSeriesSpec {
  double duration_s{1e5};
  double sample_interval_s{1.0};
  int n_realizations{1};
  uint64_t rng_seed{0};

  size_t n_samples() const;
  double nyquist_hz() const { return 0.5 / sample_interval_s; }
  // Requires an even integer sample count >= 2 so the grid tops out exactly
  // at Nyquist and the discrete Parseval identity is exact.
  void validate() const;
};

// Telegraph state sampled on the uniform grid, flips generated as exact
// exponential inter-arrivals. Deterministic per (seed, tls_index, realization).
std::vector<int8_t> simulate_telegraph(const Tls& tls, const TimeSeriesSpec& spec,
                                       int tls_index, int realization);

// One noise record per (site, realization): sum over TLS of kernel * state.
// Telegraph draws are shared across sites within a realization.
// records[site][realization][sample]
std::vector<std::vector<std::vector<double>>> synthesize_qubit_records(
    const TlsConfiguration& config, const QubitLayout& layout, Observable obs,
    const TimeSeriesSpec& spec);

// Realization-averaged periodogram. Bins k = 1 .. N/2 (DC excluded from the
// grid; its averaged power is kept separately so Parseval stays exact).
// Normalization matches lorentzian_psd: psd[k] estimates 4 tau/(1+(2 pi f tau)^2)
// for a unit telegraph record.
struct EstimatedSpectrum {
  FrequencyGrid grid;
  std::vector<double> apsd;                 // empty for cross estimates
  std::vector<std::complex<double>> cpsd;   // empty for auto estimates
  int n_realizations{0};
  double dc_power{0.0};
  double bin_width_hz{0.0};

  // Integral of the PSD over all bins including DC; equals the record's mean
  // square exactly for a single realization.
  double integral_with_dc() const;
};

EstimatedSpectrum estimate_psd(const std::vector<std::vector<double>>& realizations,
                               const TimeSeriesSpec& spec);

EstimatedSpectrum estimate_cpsd(const std::vector<std::vector<double>>& site_a,
                                const std::vector<std::vector<double>>& site_b,
                                const TimeSeriesSpec& spec);

// Pearson-normalized cross spectrum from averaged estimates (origin
// Estimated; phase is the atan2 argument, never snapped to {0, pi}).
CrossSpectrum normalized_cpsd(const EstimatedSpectrum& cross,
                              const EstimatedSpectrum& auto_a,
                              const EstimatedSpectrum& auto_b);

}  // namespace tlsnoise
