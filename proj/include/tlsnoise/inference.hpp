#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "tlsnoise/geometry.hpp"
#include "tlsnoise/hypothesis.hpp"
#include "tlsnoise/spectra.hpp"

namespace tlsnoise {

// Log-binned measured spectrum with a +-k*sigma acceptance band per bin.
struct SpectrumBin {
  double f_center_hz;
  double mean;
  double sigma;
};

struct BinnedSpectrum {
  std::vector<SpectrumBin> bins;
  double band_multiplier{3.0};

  void validate() const;  // sigma > 0, centers increasing
};

struct PhaseObservation {
  double f_center_hz;
  double phase;  // 0 or pi
};

// Everything one inference run conditions on: per-site binned APSDs,
// optional CPSD phase observations between two sites, and the geometry the
// candidate spectra must be evaluated in.
struct MeasurementSet {
  std::vector<std::pair<int, BinnedSpectrum>> apsd;  // (site index, spectrum)
  std::vector<PhaseObservation> cpsd_phase;
  std::pair<int, int> phase_sites{0, 1};
  Observable observable{Observable::Voltage};
  QubitLayout layout;

  void validate() const;  // at least one APSD present
};

// Unbinned measured spectrum with a pointwise sigma, for the cost integral.
struct ContinuousMeasurement {
  FrequencyGrid grid;
  std::vector<double> mean;
  std::vector<double> sigma;

  void validate() const;
};

// Mean squared deviation in sigma units, weighted log-uniformly in f:
//   (1 / ln(f_u/f_l)) Integral (df/f) (S_m - S_c)^2 / sigma^2
// Candidate and measurement must share a grid covering [f_lo, f_hi].
double cost(const SpectrumSeries& candidate, const ContinuousMeasurement& measured,
            double f_lo_hz, double f_hi_hz);

// True iff the candidate lies inside mean +- k*sigma at every bin center.
// The candidate grid must contain every bin center.
bool band_accept(const SpectrumSeries& candidate, const BinnedSpectrum& measured);

// True iff the candidate's {0, pi} phase matches every observation (vacuously
// true with no observations). No interpolation: each observed frequency must
// be on the candidate grid.
bool phase_accept(const CrossSpectrum& candidate,
                  const std::vector<PhaseObservation>& observations);

struct LikelihoodResult {
  double likelihood;
  long n_success;
  long n_mc;
};

// Rejection-sampling likelihood estimate P(X | hypothesis) ~ n_success / n_mc:
// each draw samples a configuration from the hypothesis prior and must pass
// band_accept on every listed APSD and match every phase observation.
// Draw i uses the derived stream (rng_seed, i). With laplace_smoothing the
// estimate becomes (n_success + 1) / (n_mc + 2).
LikelihoodResult mc_likelihood(const ModelHypothesis& hypothesis,
                               const MeasurementSet& measurement, long n_mc,
                               uint64_t rng_seed, bool laplace_smoothing = false);

struct PosteriorEntry {
  ModelHypothesis hypothesis;
  double likelihood;
  double posterior;
};

struct PosteriorTable {
  std::vector<PosteriorEntry> entries;
  long n_mc{0};
  uint64_t rng_seed{0};
};

// Posterior probabilities over a fixed hypothesis set are meaningful only
// relative to that set; configurations outside it get no mass. Attached to
// all posterior outputs.
inline constexpr const char* kHypothesisSetCaveat =
    "probabilities are relative to the swept hypothesis set; "
    "configurations outside the sweep are assigned no probability";

// posterior_j = L_j * prior_j / sum_k L_k * prior_k. Throws AllRejected when
// every product is zero.
PosteriorTable bayes_update(const std::vector<ModelHypothesis>& hypotheses,
                            const std::vector<double>& likelihoods);
PosteriorTable bayes_update(const PosteriorTable& prior,
                            const std::vector<double>& likelihoods);

// Folds bayes_update over per-sample likelihood sets (order-independent).
PosteriorTable sequential_update(
    const std::vector<ModelHypothesis>& hypotheses,
    const std::vector<std::vector<double>>& likelihood_sets);

struct OrientationBreakdown {
  OrientationClass orientation;
  double probability;   // marginal mass of the class
  double mean_n_tls;    // conditional expectations within the class
  double mean_ell_nm;
};

struct JointCell {
  int n_tls;
  double ell_nm;
  double probability;  // marginal over orientation
};

struct Expectations {
  double mean_n_tls;
  double mean_ell_nm;
  std::vector<OrientationBreakdown> by_orientation;
  std::vector<JointCell> joint;  // sorted by (n_tls, ell_nm)
};

Expectations expectations(const PosteriorTable& table);

// Sum over entries of (posterior_j - delta_j)^2; 0 for a perfect point mass
// on the truth, 2 for full confidence in a wrong entry.
double brier(const PosteriorTable& table, size_t truth_index);

// Single-dipole candidate family with one deliberately fixed assumption.
struct ScanFamily {
  Vec3 orientation{1.0, 0.0, 0.0};     // assumed dipole axis (unit)
  double height_nm{50.0};              // assumed layer height (> 0)
  std::vector<double> x_nm, y_nm;      // candidate position grid
  std::vector<double> moments_e_nm;    // candidate magnitudes (may be one)
  double switch_rate_hz{1.0};          // assumed known
};

struct ScanPoint {
  double x_nm, y_nm, moment_e_nm;
  double cost;
};

// Grid scan of the family against the analytic APSDs of a known
// configuration at every layout site, with sigma(f) = sigma_fraction * S_m(f).
// Returns the candidates whose summed per-site cost is below the threshold.
std::vector<ScanPoint> underdetermination_scan(const TlsConfiguration& truth,
                                               const QubitLayout& layout,
                                               const ScanFamily& family,
                                               double cost_threshold,
                                               const FrequencyGrid& grid,
                                               double sigma_fraction = 0.1);

// Sweep driver: per-hypothesis likelihoods with streams derived from
// (rng_seed, hypothesis index), then one Bayes update.
PosteriorTable run_inference(const std::vector<ModelHypothesis>& hypotheses,
                             const MeasurementSet& measurement, long n_mc,
                             uint64_t rng_seed, bool laplace_smoothing = false);

// Likelihoods only, for sequential protocols.
std::vector<double> sweep_likelihoods(const std::vector<ModelHypothesis>& hypotheses,
                                      const MeasurementSet& measurement, long n_mc,
                                      uint64_t rng_seed,
                                      bool laplace_smoothing = false);

}  // namespace tlsnoise
