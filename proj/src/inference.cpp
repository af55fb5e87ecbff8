#include "tlsnoise/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "tlsnoise/errors.hpp"
#include "tlsnoise/numerics.hpp"
#include "tlsnoise/rng.hpp"

namespace tlsnoise {

void BinnedSpectrum::validate() const {
  if (bins.empty()) throw ValidationError("binned spectrum has no bins");
  if (!(band_multiplier > 0.0)) throw ValidationError("band multiplier must be > 0");
  double prev = 0.0;
  for (const SpectrumBin& b : bins) {
    if (!(b.f_center_hz > prev))
      throw ValidationError("bin centers must be positive and increasing");
    if (!(b.sigma > 0.0)) throw ValidationError("bin sigma must be > 0");
    prev = b.f_center_hz;
  }
}

void MeasurementSet::validate() const {
  if (apsd.empty()) throw ValidationError("measurement set needs at least one APSD");
  for (const auto& [site, binned] : apsd) {
    if (site < 0 || static_cast<size_t>(site) >= layout.sites.size())
      throw ValidationError("APSD site index outside the layout");
    binned.validate();
  }
  if (!cpsd_phase.empty()) {
    for (int site : {phase_sites.first, phase_sites.second})
      if (site < 0 || static_cast<size_t>(site) >= layout.sites.size())
        throw ValidationError("phase site index outside the layout");
    if (phase_sites.first == phase_sites.second)
      throw ValidationError("phase observations need two distinct sites");
  }
}

void ContinuousMeasurement::validate() const {
  grid.validate();
  if (mean.size() != grid.size() || sigma.size() != grid.size())
    throw LengthMismatch("measurement arrays must match the grid");
  for (double s : sigma)
    if (!(s > 0.0)) throw ValidationError("sigma must be > 0 everywhere");
}

double cost(const SpectrumSeries& candidate, const ContinuousMeasurement& measured,
            double f_lo_hz, double f_hi_hz) {
  measured.validate();
  if (candidate.grid.values != measured.grid.values)
    throw GridCoverage("cost: candidate and measurement must share a grid");
  if (!(f_lo_hz < f_hi_hz)) throw EmptyRange("cost: f_lo >= f_hi");
  if (f_lo_hz < candidate.grid.values.front() || f_hi_hz > candidate.grid.values.back())
    throw GridCoverage("cost: grid does not cover [f_lo, f_hi]");

  std::vector<double> integrand(candidate.grid.size());
  for (size_t i = 0; i < integrand.size(); ++i) {
    const double dev = (measured.mean[i] - candidate.values[i]) / measured.sigma[i];
    integrand[i] = dev * dev;
  }
  return log_trapezoid(candidate.grid.values, integrand, f_lo_hz, f_hi_hz) /
         std::log(f_hi_hz / f_lo_hz);
}

namespace {

// Index of f in the grid, matching to 1e-9 relative.
size_t grid_index_of(const FrequencyGrid& grid, double f_hz, const char* what) {
  auto it = std::lower_bound(grid.values.begin(), grid.values.end(),
                             f_hz * (1.0 - 1e-9));
  if (it == grid.values.end() || std::abs(*it - f_hz) > 1e-9 * f_hz)
    throw GridCoverage(std::string(what) + ": frequency not on the candidate grid");
  return static_cast<size_t>(it - grid.values.begin());
}

bool classifies_as_zero(double phase) { return std::cos(phase) >= 0.0; }

}  // namespace

bool band_accept(const SpectrumSeries& candidate, const BinnedSpectrum& measured) {
  measured.validate();
  for (const SpectrumBin& bin : measured.bins) {
    const size_t i = grid_index_of(candidate.grid, bin.f_center_hz, "band_accept");
    const double half_band = measured.band_multiplier * bin.sigma;
    const double v = candidate.values[i];
    if (v < bin.mean - half_band || v > bin.mean + half_band) return false;
  }
  return true;
}

bool phase_accept(const CrossSpectrum& candidate,
                  const std::vector<PhaseObservation>& observations) {
  for (const PhaseObservation& obs : observations) {
    const size_t i = grid_index_of(candidate.grid, obs.f_center_hz, "phase_accept");
    if (classifies_as_zero(candidate.phase[i]) != classifies_as_zero(obs.phase))
      return false;
  }
  return true;
}

LikelihoodResult mc_likelihood(const ModelHypothesis& hypothesis,
                               const MeasurementSet& measurement, long n_mc,
                               uint64_t rng_seed, bool laplace_smoothing) {
  if (n_mc < 1) throw ValidationError("mc_likelihood needs n_mc >= 1");
  measurement.validate();
  hypothesis.validate();

  // Candidate spectra are evaluated exactly at the measured bin centers.
  std::vector<FrequencyGrid> apsd_grids;
  apsd_grids.reserve(measurement.apsd.size());
  for (const auto& [site, binned] : measurement.apsd) {
    FrequencyGrid g;
    for (const SpectrumBin& b : binned.bins) g.values.push_back(b.f_center_hz);
    apsd_grids.push_back(std::move(g));
  }
  FrequencyGrid phase_grid;
  for (const PhaseObservation& obs : measurement.cpsd_phase)
    phase_grid.values.push_back(obs.f_center_hz);

  long n_success = 0;
  for (long i = 0; i < n_mc; ++i) {
    Rng stream = Rng::derive(rng_seed, {static_cast<uint64_t>(i)});
    const TlsConfiguration config = sample_configuration(hypothesis, stream.next_u64());

    bool ok = true;
    for (size_t m = 0; m < measurement.apsd.size() && ok; ++m) {
      const SpectrumSeries candidate =
          analytic_apsd(config, measurement.layout, measurement.apsd[m].first,
                        measurement.observable, apsd_grids[m]);
      ok = band_accept(candidate, measurement.apsd[m].second);
    }
    if (ok && !measurement.cpsd_phase.empty()) {
      // Sign of the unnormalized cross spectrum fixes the {0, pi} phase; the
      // normalization is irrelevant to the filter.
      const std::vector<double> s12 = analytic_cpsd_values(
          config, measurement.layout, measurement.phase_sites.first,
          measurement.phase_sites.second, measurement.observable, phase_grid);
      for (size_t k = 0; k < s12.size() && ok; ++k) {
        const bool candidate_zero = s12[k] >= 0.0;
        ok = candidate_zero == classifies_as_zero(measurement.cpsd_phase[k].phase);
      }
    }
    if (ok) ++n_success;
  }

  LikelihoodResult result;
  result.n_success = n_success;
  result.n_mc = n_mc;
  result.likelihood = laplace_smoothing
                          ? static_cast<double>(n_success + 1) / static_cast<double>(n_mc + 2)
                          : static_cast<double>(n_success) / static_cast<double>(n_mc);
  return result;
}

PosteriorTable bayes_update(const std::vector<ModelHypothesis>& hypotheses,
                            const std::vector<double>& likelihoods) {
  if (hypotheses.size() != likelihoods.size())
    throw LengthMismatch("hypotheses and likelihoods differ in length");
  if (hypotheses.empty()) throw ValidationError("empty hypothesis set");

  std::vector<double> products(hypotheses.size());
  for (size_t j = 0; j < hypotheses.size(); ++j) {
    if (likelihoods[j] < 0.0) throw ValidationError("negative likelihood");
    products[j] = likelihoods[j] * hypotheses[j].prior_weight;
  }
  const double total = pairwise_sum(products);
  if (!(total > 0.0))
    throw AllRejected("every hypothesis has zero posterior mass");

  PosteriorTable table;
  table.entries.reserve(hypotheses.size());
  for (size_t j = 0; j < hypotheses.size(); ++j)
    table.entries.push_back({hypotheses[j], likelihoods[j], products[j] / total});
  return table;
}

PosteriorTable bayes_update(const PosteriorTable& prior,
                            const std::vector<double>& likelihoods) {
  std::vector<ModelHypothesis> hypotheses;
  hypotheses.reserve(prior.entries.size());
  for (const PosteriorEntry& e : prior.entries) {
    ModelHypothesis h = e.hypothesis;
    h.prior_weight = e.posterior;
    hypotheses.push_back(h);
  }
  PosteriorTable out = bayes_update(hypotheses, likelihoods);
  out.n_mc = prior.n_mc;
  out.rng_seed = prior.rng_seed;
  return out;
}

PosteriorTable sequential_update(
    const std::vector<ModelHypothesis>& hypotheses,
    const std::vector<std::vector<double>>& likelihood_sets) {
  if (likelihood_sets.empty()) throw ValidationError("no likelihood sets");
  PosteriorTable table = bayes_update(hypotheses, likelihood_sets.front());
  for (size_t s = 1; s < likelihood_sets.size(); ++s)
    table = bayes_update(table, likelihood_sets[s]);
  return table;
}

Expectations expectations(const PosteriorTable& table) {
  if (table.entries.empty()) throw ValidationError("empty posterior table");

  Expectations out{};
  std::map<OrientationClass, OrientationBreakdown> by_or;
  std::map<std::pair<int, double>, double> joint;
  for (const PosteriorEntry& e : table.entries) {
    out.mean_n_tls += e.posterior * e.hypothesis.n_tls;
    out.mean_ell_nm += e.posterior * e.hypothesis.dipole_length_nm;
    auto& b = by_or[e.hypothesis.orientation];
    b.orientation = e.hypothesis.orientation;
    b.probability += e.posterior;
    b.mean_n_tls += e.posterior * e.hypothesis.n_tls;
    b.mean_ell_nm += e.posterior * e.hypothesis.dipole_length_nm;
    joint[{e.hypothesis.n_tls, e.hypothesis.dipole_length_nm}] += e.posterior;
  }
  for (auto& [cls, b] : by_or) {
    if (b.probability > 0.0) {
      b.mean_n_tls /= b.probability;
      b.mean_ell_nm /= b.probability;
    }
    out.by_orientation.push_back(b);
  }
  for (const auto& [key, prob] : joint)
    out.joint.push_back({key.first, key.second, prob});
  return out;
}

double brier(const PosteriorTable& table, size_t truth_index) {
  if (truth_index >= table.entries.size())
    throw ValidationError("truth index outside the table");
  double score = 0.0;
  for (size_t j = 0; j < table.entries.size(); ++j) {
    const double target = (j == truth_index) ? 1.0 : 0.0;
    const double d = table.entries[j].posterior - target;
    score += d * d;
  }
  return score;
}

std::vector<ScanPoint> underdetermination_scan(const TlsConfiguration& truth,
                                               const QubitLayout& layout,
                                               const ScanFamily& family,
                                               double cost_threshold,
                                               const FrequencyGrid& grid,
                                               double sigma_fraction) {
  truth.validate();
  layout.validate();
  grid.validate();
  if (!(family.height_nm > 0.0)) throw ValidationError("family height must be > 0");
  if (!(sigma_fraction > 0.0)) throw ValidationError("sigma fraction must be > 0");
  if (family.x_nm.empty() || family.y_nm.empty() || family.moments_e_nm.empty())
    throw ValidationError("empty scan grid");
  const Vec3 axis = family.orientation.normalized();

  // The "measured" data: analytic APSDs of the known configuration.
  std::vector<ContinuousMeasurement> measured;
  for (size_t s = 0; s < layout.sites.size(); ++s) {
    const SpectrumSeries apsd = analytic_apsd(truth, layout, static_cast<int>(s),
                                              Observable::Voltage, grid);
    ContinuousMeasurement m;
    m.grid = grid;
    m.mean = apsd.values;
    m.sigma.resize(apsd.values.size());
    for (size_t i = 0; i < apsd.values.size(); ++i)
      m.sigma[i] = sigma_fraction * apsd.values[i];
    measured.push_back(std::move(m));
  }

  const double f_lo = grid.values.front();
  const double f_hi = grid.values.back();

  std::vector<ScanPoint> accepted;
  TlsConfiguration candidate;
  candidate.epsilon_r = truth.epsilon_r;
  candidate.tls.resize(1);
  candidate.tls[0].orientation = axis;
  candidate.tls[0].switch_rate_hz = family.switch_rate_hz;
  for (double x : family.x_nm) {
    for (double y : family.y_nm) {
      candidate.tls[0].position = {x, y, family.height_nm};
      for (double p : family.moments_e_nm) {
        candidate.tls[0].moment_e_nm = p;
        double total = 0.0;
        for (size_t s = 0; s < layout.sites.size(); ++s) {
          const SpectrumSeries apsd = analytic_apsd(
              candidate, layout, static_cast<int>(s), Observable::Voltage, grid);
          total += cost(apsd, measured[s], f_lo, f_hi);
          if (total >= cost_threshold) break;
        }
        if (total < cost_threshold) accepted.push_back({x, y, p, total});
      }
    }
  }
  return accepted;
}

std::vector<double> sweep_likelihoods(const std::vector<ModelHypothesis>& hypotheses,
                                      const MeasurementSet& measurement, long n_mc,
                                      uint64_t rng_seed, bool laplace_smoothing) {
  std::vector<double> likelihoods(hypotheses.size());
  for (size_t j = 0; j < hypotheses.size(); ++j) {
    Rng stream = Rng::derive(rng_seed, {static_cast<uint64_t>(j)});
    likelihoods[j] = mc_likelihood(hypotheses[j], measurement, n_mc,
                                   stream.next_u64(), laplace_smoothing)
                         .likelihood;
  }
  return likelihoods;
}

PosteriorTable run_inference(const std::vector<ModelHypothesis>& hypotheses,
                             const MeasurementSet& measurement, long n_mc,
                             uint64_t rng_seed, bool laplace_smoothing) {
  PosteriorTable table = bayes_update(
      hypotheses,
      sweep_likelihoods(hypotheses, measurement, n_mc, rng_seed, laplace_smoothing));
  table.n_mc = n_mc;
  table.rng_seed = rng_seed;
  return table;
}

}  // namespace tlsnoise
