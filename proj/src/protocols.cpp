#include "tlsnoise/protocols.hpp"

#include <cmath>

#include "tlsnoise/errors.hpp"
#include "tlsnoise/io.hpp"
#include "tlsnoise/rng.hpp"

namespace tlsnoise {

BinnedSpectrum measure_apsd_binned(const TlsConfiguration& config,
                                   const QubitLayout& layout, int site,
                                   Observable obs, const TimeSeriesSpec& spec,
                                   int bins_per_decade, double band_multiplier,
                                   double f_min_hz, double f_max_hz) {
  QubitLayout single;
  single.sites = {layout.sites.at(static_cast<size_t>(site))};
  const auto records = synthesize_qubit_records(config, single, obs, spec);
  const EstimatedSpectrum est = estimate_psd(records[0], spec);

  std::vector<std::pair<double, double>> raw;
  raw.reserve(est.grid.size());
  for (size_t i = 0; i < est.grid.size(); ++i) {
    const double f = est.grid.values[i];
    if (f_min_hz > 0.0 && f < f_min_hz) continue;
    if (f_max_hz > 0.0 && f > f_max_hz) continue;
    raw.emplace_back(f, est.apsd[i]);
  }
  return rebin_raw(raw, bins_per_decade, band_multiplier);
}

std::vector<PhaseObservation> observe_phases(const TlsConfiguration& config,
                                             const QubitLayout& layout, int site_a,
                                             int site_b, Observable obs,
                                             const std::vector<double>& freqs_hz) {
  FrequencyGrid grid;
  grid.values = freqs_hz;
  grid.validate();
  const auto s12 = analytic_cpsd_values(config, layout, site_a, site_b, obs, grid);
  std::vector<PhaseObservation> out;
  out.reserve(freqs_hz.size());
  for (size_t i = 0; i < freqs_hz.size(); ++i)
    out.push_back({freqs_hz[i], s12[i] >= 0.0 ? 0.0 : 3.14159265358979323846});
  return out;
}

std::vector<ModelHypothesis> brier_hypotheses(const BrierProtocolConfig& cfg) {
  std::vector<ModelHypothesis> hyps;
  for (int count : cfg.counts) {
    for (double moment : cfg.moments_e_nm) {
      ModelHypothesis h;
      h.n_tls = count;
      h.dipole_length_nm = moment;
      h.orientation = cfg.orientation;
      h.layer = cfg.layer;
      h.rate_interval_hz = cfg.rate_interval_hz;
      h.epsilon_r = cfg.epsilon_r;
      h.prior_weight = 1.0 / static_cast<double>(cfg.counts.size() * cfg.moments_e_nm.size());
      hyps.push_back(h);
    }
  }
  return hyps;
}

BrierOutcome run_brier_protocol(const BrierProtocolConfig& cfg, uint64_t seed) {
  const std::vector<ModelHypothesis> hyps = brier_hypotheses(cfg);

  size_t truth_index = hyps.size();
  for (size_t j = 0; j < hyps.size(); ++j)
    if (hyps[j].n_tls == cfg.truth_count &&
        hyps[j].dipole_length_nm == cfg.truth_moment_e_nm)
      truth_index = j;
  if (truth_index == hyps.size())
    throw ValidationError("the true (count, moment) cell is not in the sweep");

  // Two independently drawn samples from the true hypothesis.
  ModelHypothesis truth_hyp = hyps[truth_index];
  const TlsConfiguration sample1 =
      sample_configuration(truth_hyp, Rng::derive(seed, {0}).next_u64());
  const TlsConfiguration sample2 =
      sample_configuration(truth_hyp, Rng::derive(seed, {1}).next_u64());

  TimeSeriesSpec spec;
  spec.duration_s = cfg.duration_s;
  spec.sample_interval_s = cfg.sample_interval_s;
  spec.n_realizations = cfg.n_realizations;

  auto binned_for = [&](const TlsConfiguration& config, int site, uint64_t sub) {
    TimeSeriesSpec s = spec;
    s.rng_seed = Rng::derive(seed, {10, sub}).next_u64();
    return measure_apsd_binned(config, cfg.layout, site, Observable::Voltage, s,
                               cfg.bins_per_decade, cfg.band_multiplier,
                               cfg.band_f_lo_hz, cfg.band_f_hi_hz);
  };

  const BinnedSpectrum s1_dot1 = binned_for(sample1, 0, 0);
  const BinnedSpectrum s1_dot2 = binned_for(sample1, 1, 1);
  const BinnedSpectrum s2_dot1 = binned_for(sample2, 0, 2);

  MeasurementSet one_dot;
  one_dot.layout = cfg.layout;
  one_dot.apsd = {{0, s1_dot1}};

  MeasurementSet two_dots = one_dot;
  two_dots.apsd.push_back({1, s1_dot2});

  MeasurementSet second_sample;
  second_sample.layout = cfg.layout;
  second_sample.apsd = {{0, s2_dot1}};

  const auto l_one = sweep_likelihoods(hyps, one_dot, cfg.n_mc,
                                       Rng::derive(seed, {20}).next_u64());
  const auto l_two = sweep_likelihoods(hyps, two_dots, cfg.n_mc,
                                       Rng::derive(seed, {21}).next_u64());
  const auto l_second = sweep_likelihoods(hyps, second_sample, cfg.n_mc,
                                          Rng::derive(seed, {22}).next_u64());

  BrierOutcome out;
  out.one_dot = brier(bayes_update(hyps, l_one), truth_index);
  out.two_dots = brier(bayes_update(hyps, l_two), truth_index);
  out.two_samples = brier(sequential_update(hyps, {l_one, l_second}), truth_index);
  return out;
}

}  // namespace tlsnoise
