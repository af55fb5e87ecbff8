#pragma once
#include <cstdint>
#include <vector>

#include "tlsnoise/inference.hpp"
#include "tlsnoise/telegraph.hpp"

namespace tlsnoise {

// Synthetic measurement: telegraph records of `config` at one site,
// periodogram-averaged, then log-binned with per-bin mean and standard
// deviation of the raw periodogram values (DC excluded).
BinnedSpectrum measure_apsd_binned(const TlsConfiguration& config,
                                   const QubitLayout& layout, int site,
                                   Observable obs, const TimeSeriesSpec& spec,
                                   int bins_per_decade, double band_multiplier,
                                   double f_min_hz = 0.0, double f_max_hz = 0.0);

// Analytic {0, pi} phase of config's CPSD at the listed frequencies.
std::vector<PhaseObservation> observe_phases(const TlsConfiguration& config,
                                             const QubitLayout& layout, int site_a,
                                             int site_b, Observable obs,
                                             const std::vector<double>& freqs_hz);

// Mock single-dipole experiment over a count x magnitude hypothesis grid,
// scored three ways: one dot, two dots, and two independently drawn samples
// measured on one dot with the posteriors chained.
struct BrierProtocolConfig {
  std::vector<int> counts{1, 10};
  std::vector<double> moments_e_nm{10.0, 100.0, 1000.0};
  int truth_count{1};
  double truth_moment_e_nm{100.0};
  OrientationClass orientation{OrientationClass::VerticalZ};
  BoxRegion layer{{-100.0, 100.0}, {-150.0, 150.0}, {50.0, 75.0}};
  QubitLayout layout{{{-50.0, 0.0, 0.0}, {50.0, 0.0, 0.0}}};
  AxisRange rate_interval_hz{1e-5, 1.0};
  double epsilon_r{11.0};
  double duration_s{1e5};
  double sample_interval_s{1.0};
  int n_realizations{20};
  int bins_per_decade{2};
  double band_multiplier{3.0};
  double band_f_lo_hz{1e-5};
  double band_f_hi_hz{0.1};
  long n_mc{2000};
};

struct BrierOutcome {
  double one_dot;
  double two_dots;
  double two_samples;
};

std::vector<ModelHypothesis> brier_hypotheses(const BrierProtocolConfig& cfg);

// Runs one seed of the protocol. Throws AllRejected if a posterior cannot be
// formed (overly tight bands).
BrierOutcome run_brier_protocol(const BrierProtocolConfig& cfg, uint64_t seed);

}  // namespace tlsnoise
