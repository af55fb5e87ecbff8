#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tlsnoise/errors.hpp"
#include "tlsnoise/spectra.hpp"

using namespace tlsnoise;

namespace {

const QubitLayout kTwoSites{{{-50.0, 0.0, 0.0}, {50.0, 0.0, 0.0}}};

TlsConfiguration single_tls(double rate = 1e-2) {
  Tls t{{20.0, 15.0, 72.0}, {0.0, 0.0, 1.0}, 1.0, rate};
  return {{t}, 11.0};
}

TlsConfiguration random_layer_config(int n, OrientationClass cls, uint64_t seed) {
  ModelHypothesis hyp;
  hyp.n_tls = n;
  hyp.orientation = cls;
  hyp.layer = {{-150.0, 150.0}, {-150.0, 150.0}, {72.0, 72.0}};
  hyp.rate_interval_hz = {1e-5, 1.0};
  return sample_configuration(hyp, seed);
}

}  // namespace

TEST_CASE("frequency grid validation") {
  CHECK_THROWS_AS(FrequencyGrid{}.validate(), ValidationError);
  CHECK_THROWS_AS((FrequencyGrid{{1.0, 1.0}}).validate(), ValidationError);
  CHECK_THROWS_AS((FrequencyGrid{{0.0, 1.0}}).validate(), ValidationError);
  const auto g = FrequencyGrid::log_spaced(1e-5, 0.5, 60);
  CHECK_NOTHROW(g.validate());
  CHECK(g.values.front() == doctest::Approx(1e-5));
  CHECK(g.values.back() == 0.5);
}

TEST_CASE("single TLS spectrum is a Lorentzian with half power at 1/(2 pi tau)") {
  const auto config = single_tls(1e-2);
  const double tau = config.tls[0].tau_s();  // 50 s
  FrequencyGrid g{{1e-12, 1.0 / (2.0 * std::numbers::pi * tau), 10.0}};
  const auto s = analytic_apsd(config, kTwoSites, 0, Observable::Voltage, g);

  CHECK(s.values[1] == doctest::Approx(0.5 * s.values[0]).epsilon(1e-9));
  // shape: S(f)/S(0) = 1/(1+(2 pi f tau)^2)
  const double w = 2.0 * std::numbers::pi * 10.0 * tau;
  CHECK(s.values[2] / s.values[0] == doctest::Approx(1.0 / (1.0 + w * w)).epsilon(1e-9));
}

TEST_CASE("two co-located TLS give exactly twice the single spectrum") {
  auto config = single_tls();
  config.tls.push_back(config.tls[0]);
  const auto grid = FrequencyGrid::log_spaced(1e-4, 0.5, 30);
  const auto one = analytic_apsd(single_tls(), kTwoSites, 0, Observable::Voltage, grid);
  const auto two = analytic_apsd(config, kTwoSites, 0, Observable::Voltage, grid);
  for (size_t i = 0; i < grid.size(); ++i)
    CHECK(two.values[i] == doctest::Approx(2.0 * one.values[i]).epsilon(1e-15));
}

TEST_CASE("spectra add over configuration unions") {
  const auto a = random_layer_config(6, OrientationClass::FullyRandom, 31);
  const auto b = random_layer_config(4, OrientationClass::HorizontalRandom, 32);
  TlsConfiguration both = a;
  both.tls.insert(both.tls.end(), b.tls.begin(), b.tls.end());
  const auto grid = FrequencyGrid::log_spaced(1e-5, 0.5, 40);
  const auto sa = analytic_apsd(a, kTwoSites, 1, Observable::Voltage, grid);
  const auto sb = analytic_apsd(b, kTwoSites, 1, Observable::Voltage, grid);
  const auto sboth = analytic_apsd(both, kTwoSites, 1, Observable::Voltage, grid);
  for (size_t i = 0; i < grid.size(); ++i)
    CHECK(sboth.values[i] == doctest::Approx(sa.values[i] + sb.values[i]).epsilon(1e-12));
}

TEST_CASE("single TLS cross spectrum has unit strength and constant phase") {
  const auto grid = FrequencyGrid::log_spaced(1e-5, 0.5, 50);
  const auto cross =
      analytic_cpsd(single_tls(), kTwoSites, 0, 1, Observable::Voltage, grid);
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(cross.strength[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cross.phase[i] == cross.phase[0]);
    CHECK(cross.values[i].imag() == 0.0);
  }
}

TEST_CASE("x dipole inside the slab gives phase pi at every frequency") {
  Tls t{{0.0, 10.0, 72.0}, {1.0, 0.0, 0.0}, 1.0, 1e-3};
  const TlsConfiguration config{{t}, 11.0};
  const auto grid = FrequencyGrid::log_spaced(1e-5, 0.5, 25);
  const auto cross = analytic_cpsd(config, kTwoSites, 0, 1, Observable::Voltage, grid);
  for (double ph : cross.phase) CHECK(ph == doctest::Approx(std::numbers::pi));
}

TEST_CASE("analytic CPSD is real and Cauchy-Schwarz bounded") {
  const auto grid = FrequencyGrid::log_spaced(1e-5, 0.5, 40);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const auto config = random_layer_config(8, OrientationClass::FullyRandom, 40 + seed);
    const auto cross = analytic_cpsd(config, kTwoSites, 0, 1, Observable::Voltage, grid);
    const auto sa = analytic_apsd(config, kTwoSites, 0, Observable::Voltage, grid);
    const auto sb = analytic_apsd(config, kTwoSites, 1, Observable::Voltage, grid);
    for (size_t i = 0; i < grid.size(); ++i) {
      CHECK(cross.values[i].imag() == 0.0);
      const double s12 = cross.values[i].real();
      CHECK(s12 * s12 <= sa.values[i] * sb.values[i] * (1.0 + 1e-9));
      CHECK(cross.strength[i] <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("coincident sites reduce the CPSD to the APSD with unit coherence") {
  // Distinct indices, identical coordinates: the d -> 0 limit.
  const QubitLayout degenerate{{{-50.0, 0.0, 0.0}, {-50.0, 0.0, 0.0}}};
  const auto config = random_layer_config(8, OrientationClass::FullyRandom, 77);
  const auto grid = FrequencyGrid::log_spaced(1e-5, 0.5, 30);
  const auto cross = analytic_cpsd(config, degenerate, 0, 1, Observable::Voltage, grid);
  const auto apsd = analytic_apsd(config, degenerate, 0, Observable::Voltage, grid);
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(cross.values[i].real() == doctest::Approx(apsd.values[i]).epsilon(1e-12));
    CHECK(cross.normalized[i].real() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("same site indices are rejected; zero APSD is DegenerateSpectrum") {
  const auto grid = FrequencyGrid::log_spaced(1e-4, 0.1, 10);
  CHECK_THROWS_AS(
      analytic_cpsd(single_tls(), kTwoSites, 1, 1, Observable::Voltage, grid),
      ValidationError);

  // x-oriented dipole exactly above site 0: zero kernel there.
  Tls t{{-50.0, 0.0, 72.0}, {1.0, 0.0, 0.0}, 1.0, 1e-2};
  const TlsConfiguration config{{t}, 11.0};
  CHECK_THROWS_AS(analytic_cpsd(config, kTwoSites, 0, 1, Observable::Voltage, grid),
                  DegenerateSpectrum);
}

TEST_CASE("ensemble-mean APSD under fully random equals the axis average") {
  // Fixed positions and rates; only orientations are redrawn.
  const auto base = random_layer_config(6, OrientationClass::VerticalZ, 123);
  const auto grid = FrequencyGrid{{1e-3}};

  auto apsd0 = [&](const TlsConfiguration& c) {
    return analytic_apsd(c, kTwoSites, 0, Observable::Voltage, grid).values[0];
  };

  TlsConfiguration cx = base, cy = base, cz = base;
  for (size_t i = 0; i < base.tls.size(); ++i) {
    cx.tls[i].orientation = {1.0, 0.0, 0.0};
    cy.tls[i].orientation = {0.0, 1.0, 0.0};
    cz.tls[i].orientation = {0.0, 0.0, 1.0};
  }
  const double axis_mean = (apsd0(cx) + apsd0(cy) + apsd0(cz)) / 3.0;

  Rng rng(456);
  const int n_draws = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n_draws; ++k) {
    TlsConfiguration c = base;
    for (Tls& t : c.tls)
      t.orientation = sample_orientation(OrientationClass::FullyRandom, rng);
    const double v = apsd0(c);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n_draws;
  const double se = std::sqrt((sum2 / n_draws - mean * mean) / n_draws);
  CHECK(std::abs(mean - axis_mean) < 3.0 * se);
}

TEST_CASE("weighted phase percentages: constant and half-band phases") {
  FrequencyGrid grid;
  for (int i = 0; i <= 400; ++i) grid.values.push_back(1e-4 * std::pow(10.0, i / 100.0));

  CrossSpectrum cross;
  cross.grid = grid;
  cross.phase.assign(grid.size(), 0.0);
  cross.strength.assign(grid.size(), 1.0);
  cross.values.assign(grid.size(), {1.0, 0.0});
  cross.normalized.assign(grid.size(), {1.0, 0.0});

  auto pct = weighted_phase_percentages(cross, 1e-4, 1.0);
  CHECK(pct.pct_zero == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(pct.pct_pi == doctest::Approx(0.0).epsilon(1e-12));

  // pi on exactly the upper half of the log range [1e-4, 1]: flip at 1e-2.
  // Insert a point just below the flip so the transition has zero log-width.
  FrequencyGrid grid2 = grid;
  CrossSpectrum cross2 = cross;
  const double flip = 1e-2;
  auto it = std::lower_bound(grid2.values.begin(), grid2.values.end(), flip);
  const size_t flip_idx = static_cast<size_t>(it - grid2.values.begin());
  grid2.values.insert(it, flip * (1.0 - 1e-12));
  cross2.grid = grid2;
  cross2.phase.assign(grid2.size(), 0.0);
  cross2.strength.assign(grid2.size(), 1.0);
  cross2.values.assign(grid2.size(), {1.0, 0.0});
  cross2.normalized.assign(grid2.size(), {1.0, 0.0});
  for (size_t i = flip_idx + 1; i < grid2.size(); ++i)
    cross2.phase[i] = std::numbers::pi;

  pct = weighted_phase_percentages(cross2, 1e-4, 1.0);
  CHECK(pct.pct_zero == doctest::Approx(50.0).epsilon(1e-6));
  CHECK(pct.pct_pi == doctest::Approx(50.0).epsilon(1e-6));
  CHECK(pct.pct_zero + pct.pct_pi == doctest::Approx(100.0).epsilon(1e-9));

  CHECK_THROWS_AS(weighted_phase_percentages(cross, 1e-5, 1.0), GridCoverage);
  CHECK_THROWS_AS(weighted_phase_percentages(cross, 1e-2, 1e-2), EmptyRange);
}

TEST_CASE("a mixed-phase layer draw sums to 100 with both phases present") {
  const auto grid = FrequencyGrid::log_spaced(1e-5, 0.5, 300);
  const auto config = random_layer_config(10, OrientationClass::HorizontalRandom, 2024);
  const auto cross = analytic_cpsd(config, kTwoSites, 0, 1, Observable::Voltage, grid);
  const auto pct = weighted_phase_percentages(cross, 1e-5, 0.5);
  CHECK(pct.pct_zero + pct.pct_pi == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(pct.pct_zero > 0.0);
  CHECK(pct.pct_zero < 100.0);
}

TEST_CASE("orientation ensembles: y and z classes are always fully correlated") {
  // The 50 nm layer: anticorrelation is strong enough there that the in-plane
  // random class has a clearly positive median pi weight.
  EnsembleSpec spec;
  spec.n_tls = 10;
  spec.layer = {{-150.0, 150.0}, {-150.0, 150.0}, {50.0, 50.0}};
  spec.layout = kTwoSites;
  const auto grid = FrequencyGrid::log_spaced(1e-5, 0.5, 120);
  const std::vector<double> freqs{1e-4, 1e-3, 1e-2, 1e-1};

  const auto stats = orientation_ensemble_stats(spec, 60, 9, grid, freqs);
  REQUIRE(stats.size() == 5);
  for (const auto& s : stats) {
    CHECK(s.strength_mean >= 0.0);
    CHECK(s.strength_mean <= 1.0 + 1e-9);
    if (s.orientation == OrientationClass::HorizontalY ||
        s.orientation == OrientationClass::VerticalZ) {
      CHECK(s.median_pct_zero == doctest::Approx(100.0).epsilon(1e-9));
      CHECK(s.q1_pct_zero == doctest::Approx(100.0).epsilon(1e-9));
      CHECK(s.median_pct_pi == doctest::Approx(0.0).epsilon(1e-9));
    }
  }

  // Anticorrelation ordering: x-aligned > in-plane random > fully random.
  auto median_pi = [&](OrientationClass cls) {
    for (const auto& s : stats)
      if (s.orientation == cls) return s.median_pct_pi;
    FAIL("class missing");
    return 0.0;
  };
  CHECK(median_pi(OrientationClass::HorizontalX) >
        median_pi(OrientationClass::HorizontalRandom));
  CHECK(median_pi(OrientationClass::HorizontalRandom) >
        median_pi(OrientationClass::FullyRandom));
}

TEST_CASE("a single ensemble sample has zero interquartile range") {
  EnsembleSpec spec;
  spec.n_tls = 5;
  spec.layer = {{-150.0, 150.0}, {-150.0, 150.0}, {72.0, 72.0}};
  spec.layout = kTwoSites;
  const auto grid = FrequencyGrid::log_spaced(1e-5, 0.5, 60);
  const auto stats = orientation_ensemble_stats(spec, 1, 3, grid, {1e-3});
  for (const auto& s : stats) {
    CHECK(s.q3_pct_zero - s.q1_pct_zero == 0.0);
    CHECK(s.q3_pct_pi - s.q1_pct_pi == 0.0);
  }
}
