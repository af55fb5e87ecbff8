#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "tlsnoise/geometry.hpp"
#include "tlsnoise/hypothesis.hpp"

namespace tlsnoise {

struct FrequencyGrid {
  std::vector<double> values;  // Hz, strictly increasing, all > 0

  static FrequencyGrid log_spaced(double f_min, double f_max, int points);
  size_t size() const { return values.size(); }
  void validate() const;
};

enum class Observable { Voltage, FieldX, FieldY, FieldZ };

const char* observable_name(Observable o);
Observable observable_from_name(const std::string& name);

// Kernel for the selected observable: volts (Voltage) or V/nm (Field*).
double observable_kernel(const Tls& tls, const Vec3& site, double epsilon_r,
                         Observable obs);

// Spectrum of a unit-variance telegraph state with relaxation time tau,
// normalized so that the integral over f in [0, inf) is 1:
//   L(f; tau) = 4 tau / (1 + (2 pi f tau)^2).
// This folded (one-sided) normalization is used consistently by both the
// analytic spectra and the FFT estimator.
double lorentzian_psd(double f_hz, double tau_s);

enum class SpectrumOrigin { Analytic, Estimated };

struct SpectrumSeries {
  FrequencyGrid grid;
  std::vector<double> values;  // V^2/Hz or (V/nm)^2/Hz, >= 0
  Observable observable{Observable::Voltage};
  int site_index{0};
};

struct CrossSpectrum {
  FrequencyGrid grid;
  std::vector<std::complex<double>> values;      // unnormalized S_12
  std::vector<std::complex<double>> normalized;  // Pearson ratio
  std::vector<double> phase;     // {0, pi} for analytic origin, atan2 otherwise
  std::vector<double> strength;  // |normalized|
  SpectrumOrigin origin{SpectrumOrigin::Analytic};
};

// S(f) = sum_n k_n^2 L(f; tau_n) at one site.
SpectrumSeries analytic_apsd(const TlsConfiguration& config, const QubitLayout& layout,
                             int site, Observable obs, const FrequencyGrid& grid);

// S_12(f) = sum_n k_n(a) k_n(b) L(f; tau_n), normalized by the two APSDs.
// Statistically independent TLS make this exactly real, so the phase is 0
// where S_12 >= 0 and pi where S_12 < 0. Throws DegenerateSpectrum when an
// APSD vanishes at a grid frequency.
CrossSpectrum analytic_cpsd(const TlsConfiguration& config, const QubitLayout& layout,
                            int site_a, int site_b, Observable obs,
                            const FrequencyGrid& grid);

// Unnormalized S_12 values only; never throws DegenerateSpectrum. Used where
// only the sign pattern matters.
std::vector<double> analytic_cpsd_values(const TlsConfiguration& config,
                                         const QubitLayout& layout, int site_a,
                                         int site_b, Observable obs,
                                         const FrequencyGrid& grid);

// Fraction of the band, weighted by 1/f (equal weight per decade), whose
// phase classifies as 0 vs pi. Returns percentages that sum to 100.
// Estimated-origin phases classify to the nearer of the two values.
struct PhasePercentages {
  double pct_zero;
  double pct_pi;
};
PhasePercentages weighted_phase_percentages(const CrossSpectrum& cross, double f_lo,
                                            double f_hi);

// Ensemble of same-shape configurations differing only in their random draws.
struct EnsembleSpec {
  int n_tls{10};
  double moment_e_nm{1.0};
  BoxRegion layer;
  AxisRange rate_interval_hz{1e-5, 1.0};
  double epsilon_r{11.0};
  QubitLayout layout;           // exactly two sites
  Observable observable{Observable::Voltage};
  double f_lo_hz{1e-5};
  double f_hi_hz{0.5};
};

struct OrientationStats {
  OrientationClass orientation;
  double median_pct_zero, q1_pct_zero, q3_pct_zero;
  double median_pct_pi, q1_pct_pi, q3_pct_pi;
  double strength_mean, strength_std;  // pooled over samples and listed freqs
};

// Runs the ensemble for each orientation class and summarizes the phase
// percentages (median / interquartile bounds) and the correlation strength
// at the listed frequencies (mean +- standard deviation).
std::vector<OrientationStats> orientation_ensemble_stats(
    const EnsembleSpec& spec, int n_samples, uint64_t rng_seed,
    const FrequencyGrid& grid, const std::vector<double>& strength_freqs_hz);

}  // namespace tlsnoise
