// tlsnoise: charge-noise spectra and Bayesian TLS inference from the command
// line. Every run takes an explicit seed, writes its outputs atomically, and
// drops a run_manifest.json listing inputs, seed, wall time, and a content
// hash for each output file.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "tlsnoise/continuum.hpp"
#include "tlsnoise/errors.hpp"
#include "tlsnoise/inference.hpp"
#include "tlsnoise/io.hpp"
#include "tlsnoise/numerics.hpp"
#include "tlsnoise/protocols.hpp"
#include "tlsnoise/rng.hpp"
#include "tlsnoise/spectra.hpp"
#include "tlsnoise/telegraph.hpp"

namespace fs = std::filesystem;
using namespace tlsnoise;

namespace {

// JSON run-config support: file values fill in flags the command line left
// untouched (precedence: CLI > file > built-in defaults). Unknown keys are
// rejected so typos do not silently fall back to defaults.
class ConfigApplier {
 public:
  ConfigApplier(CLI::App* cmd, const std::string& path) : cmd_(cmd) {
    if (path.empty()) return;
    try {
      doc_ = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("config file: ") + e.what());
    }
    if (!doc_.is_object()) throw ParseError("config file must hold a JSON object");
  }

  template <typename T>
  void apply(const std::string& flag, T& var) {
    const std::string key = flag.substr(2);
    known_.insert(key);
    if (doc_.is_null() || !doc_.contains(key)) return;
    if (cmd_->get_option(flag)->count() > 0) return;  // CLI wins
    try {
      var = doc_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("config key '" + key + "': " + e.what());
    }
  }

  void finish() const {
    if (doc_.is_null()) return;
    for (const auto& [key, value] : doc_.items())
      if (!known_.contains(key))
        throw ValidationError("unknown config key '" + key + "'");
  }

 private:
  CLI::App* cmd_;
  nlohmann::json doc_;
  std::set<std::string> known_;
};

QubitLayout layout_from_flat(const std::vector<double>& flat) {
  if (flat.size() < 2 || flat.size() % 2 != 0)
    throw ValidationError("--sites needs x,y pairs");
  QubitLayout layout;
  for (size_t i = 0; i < flat.size(); i += 2)
    layout.sites.push_back({flat[i], flat[i + 1], 0.0});
  layout.validate();
  return layout;
}

Vec3 vec3_from_flat(const std::vector<double>& flat, const char* what) {
  if (flat.size() != 3) throw ValidationError(std::string(what) + " needs x,y,z");
  return {flat[0], flat[1], flat[2]};
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ValidationError("grid needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// continuum: layer-integral sweep over qubit separation
// ---------------------------------------------------------------------------

struct ContinuumCmd {
  double R = 100.0, h = 50.0;
  double d_min = 0.0, d_max = 150.0;
  int steps = 61;
  uint64_t seed = 1;
  std::string out_dir = ".";
  std::string config;
};

int run_continuum(const ContinuumCmd& p) {
  Timer timer;
  const DiscLayer layer{p.R, p.h, 1.0};
  std::vector<std::array<double, 5>> rows;
  for (double d : linspace(p.d_min, p.d_max, p.steps)) {
    const double ax = layer_integral(layer, d, LayerOrientation::X);
    const double ay = layer_integral(layer, d, LayerOrientation::Y);
    const double az = layer_integral(layer, d, LayerOrientation::Z);
    rows.push_back({d, ax, ay, az, (ax + ay + az) / 3.0});
  }

  fs::create_directories(p.out_dir);
  const fs::path csv = fs::path(p.out_dir) / "continuum_sweep.csv";
  atomic_write(csv, continuum_sweep_csv(rows));

  std::printf("closed forms at d=0: a_x=%s a_z=%s a_r=%s\n",
              fmt_g(layer_integral_closed_form_d0(layer, LayerOrientation::X)).c_str(),
              fmt_g(layer_integral_closed_form_d0(layer, LayerOrientation::Z)).c_str(),
              fmt_g(layer_integral_closed_form_d0(layer, LayerOrientation::Random)).c_str());
  try {
    const double dc = critical_separation(layer, std::max(p.d_min, 0.0), p.d_max);
    std::printf("a_x sign change at d_c = %.2f nm\n", dc);
  } catch (const NoBracket&) {
    std::printf("a_x does not change sign on [%g, %g] nm\n", p.d_min, p.d_max);
  }

  RunManifest manifest("continuum", p.seed);
  manifest.add_input("R", fmt_g(p.R));
  manifest.add_input("h", fmt_g(p.h));
  manifest.add_input("d-min", fmt_g(p.d_min));
  manifest.add_input("d-max", fmt_g(p.d_max));
  manifest.add_input("steps", std::to_string(p.steps));
  manifest.add_output(csv);
  manifest.set_wall_time_s(timer.seconds());
  manifest.write(fs::path(p.out_dir) / "run_manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// spectra: analytic APSD/CPSD of a configuration file
// ---------------------------------------------------------------------------

struct SpectraCmd {
  std::string tls_config;
  std::vector<double> sites{-50.0, 0.0, 50.0, 0.0};
  std::string observable = "voltage";
  double f_min = 1e-5, f_max = 0.5;
  int points = 241;
  uint64_t seed = 1;
  std::string out_dir = ".";
  std::string config;
};

int run_spectra(const SpectraCmd& p) {
  Timer timer;
  const TlsConfiguration config = configuration_from_json(read_file(p.tls_config));
  const QubitLayout layout = layout_from_flat(p.sites);
  const Observable obs = observable_from_name(p.observable);
  const FrequencyGrid grid = FrequencyGrid::log_spaced(p.f_min, p.f_max, p.points);

  fs::create_directories(p.out_dir);
  RunManifest manifest("spectra", p.seed);
  manifest.add_input("tls-config", p.tls_config);
  manifest.add_input("observable", p.observable);
  manifest.add_input("f-min", fmt_g(p.f_min));
  manifest.add_input("f-max", fmt_g(p.f_max));
  manifest.add_input("points", std::to_string(p.points));

  for (size_t s = 0; s < layout.sites.size(); ++s) {
    const auto apsd = analytic_apsd(config, layout, static_cast<int>(s), obs, grid);
    const fs::path file =
        fs::path(p.out_dir) / ("apsd_site" + std::to_string(s) + ".csv");
    atomic_write(file, spectrum_csv(apsd));
    manifest.add_output(file);
  }
  for (size_t a = 0; a < layout.sites.size(); ++a) {
    for (size_t b = a + 1; b < layout.sites.size(); ++b) {
      const auto cross = analytic_cpsd(config, layout, static_cast<int>(a),
                                       static_cast<int>(b), obs, grid);
      const fs::path file = fs::path(p.out_dir) / ("cpsd_" + std::to_string(a) + "_" +
                                                   std::to_string(b) + ".csv");
      atomic_write(file, cross_spectrum_csv(cross));
      manifest.add_output(file);
      const auto pct = weighted_phase_percentages(cross, p.f_min, p.f_max);
      std::printf("sites (%zu,%zu): 1/f-weighted phase 0: %.1f%%  pi: %.1f%%\n", a, b,
                  pct.pct_zero, pct.pct_pi);
    }
  }
  manifest.set_wall_time_s(timer.seconds());
  manifest.write(fs::path(p.out_dir) / "run_manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// simulate: telegraph synthesis and FFT spectral estimation
// ---------------------------------------------------------------------------

struct SimulateCmd {
  std::string tls_config;
  std::vector<double> sites{-50.0, 0.0, 50.0, 0.0};
  std::string observable = "voltage";
  double duration = 1e5, dt = 1.0;
  int realizations = 100;
  bool write_records = false;
  uint64_t seed = 1;
  std::string out_dir = ".";
  std::string config;
};

int run_simulate(const SimulateCmd& p) {
  Timer timer;
  const TlsConfiguration config = configuration_from_json(read_file(p.tls_config));
  const QubitLayout layout = layout_from_flat(p.sites);
  const Observable obs = observable_from_name(p.observable);
  TimeSeriesSpec spec{p.duration, p.dt, p.realizations, p.seed};
  spec.validate();

  const auto records = synthesize_qubit_records(config, layout, obs, spec);

  fs::create_directories(p.out_dir);
  RunManifest manifest("simulate", p.seed);
  manifest.add_input("tls-config", p.tls_config);
  manifest.add_input("observable", p.observable);
  manifest.add_input("duration", fmt_g(p.duration));
  manifest.add_input("dt", fmt_g(p.dt));
  manifest.add_input("realizations", std::to_string(p.realizations));

  std::vector<EstimatedSpectrum> apsds;
  for (size_t s = 0; s < layout.sites.size(); ++s) {
    apsds.push_back(estimate_psd(records[s], spec));
    const fs::path file =
        fs::path(p.out_dir) / ("estimated_apsd_site" + std::to_string(s) + ".csv");
    atomic_write(file, estimated_apsd_csv(apsds.back()));
    manifest.add_output(file);
  }
  if (layout.sites.size() >= 2) {
    const auto cross =
        normalized_cpsd(estimate_cpsd(records[0], records[1], spec), apsds[0], apsds[1]);
    const fs::path file = fs::path(p.out_dir) / "estimated_cpsd_0_1.csv";
    atomic_write(file, estimated_cpsd_csv(cross, spec.n_realizations));
    manifest.add_output(file);
  }
  if (p.write_records) {
    std::vector<std::vector<double>> first;
    for (const auto& site_records : records) first.push_back(site_records[0]);
    const fs::path file = fs::path(p.out_dir) / "records.csv";
    atomic_write(file, records_csv(spec, first));
    manifest.add_output(file);
  }
  manifest.set_wall_time_s(timer.seconds());
  manifest.write(fs::path(p.out_dir) / "run_manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// scan-underdetermined: low-cost candidates under a wrong fixed assumption
// ---------------------------------------------------------------------------

struct ScanCmd {
  std::vector<double> truth_pos{20.0, 10.0, 50.0};
  std::vector<double> truth_orient{0.0, 0.0, 1.0};
  double truth_moment = 1.0;
  double switch_rate = 1e-2;
  std::vector<double> assume_orient{1.0, 0.0, 0.0};
  double height = 50.0;
  double x_min = -100.0, x_max = 100.0;
  int x_steps = 81;
  double y_min = -100.0, y_max = 100.0;
  int y_steps = 81;
  double p_min = 0.02, p_max = 50.0;
  int p_steps = 783;
  double threshold = 0.1;
  double sigma_fraction = 0.2;
  double f_min = 1e-4, f_max = 1.0;
  int f_points = 9;
  std::vector<double> sites{-50.0, 0.0, 50.0, 0.0};
  double epsilon_r = 11.0;
  uint64_t seed = 1;
  std::string out_dir = ".";
  std::string config;
};

int run_scan(const ScanCmd& p) {
  Timer timer;
  Tls truth_tls;
  truth_tls.position = vec3_from_flat(p.truth_pos, "--truth-pos");
  truth_tls.orientation = vec3_from_flat(p.truth_orient, "--truth-orient").normalized();
  truth_tls.moment_e_nm = p.truth_moment;
  truth_tls.switch_rate_hz = p.switch_rate;
  const TlsConfiguration truth{{truth_tls}, p.epsilon_r};
  const QubitLayout layout = layout_from_flat(p.sites);

  ScanFamily family;
  family.orientation = vec3_from_flat(p.assume_orient, "--assume-orient").normalized();
  family.height_nm = p.height;
  family.x_nm = linspace(p.x_min, p.x_max, p.x_steps);
  family.y_nm = linspace(p.y_min, p.y_max, p.y_steps);
  family.switch_rate_hz = p.switch_rate;
  if (p.p_steps == 1) {
    family.moments_e_nm = {p.p_min};
  } else {
    family.moments_e_nm.resize(p.p_steps);
    for (int i = 0; i < p.p_steps; ++i)
      family.moments_e_nm[i] =
          p.p_min * std::exp(std::log(p.p_max / p.p_min) * i / (p.p_steps - 1));
  }

  const FrequencyGrid grid = FrequencyGrid::log_spaced(p.f_min, p.f_max, p.f_points);
  const auto points =
      underdetermination_scan(truth, layout, family, p.threshold, grid, p.sigma_fraction);

  std::string csv = "x_nm,y_nm,moment_e_nm,cost\n";
  for (const auto& pt : points)
    csv += fmt_g(pt.x_nm) + "," + fmt_g(pt.y_nm) + "," + fmt_g(pt.moment_e_nm) + "," +
           fmt_g(pt.cost) + "\n";

  fs::create_directories(p.out_dir);
  const fs::path file = fs::path(p.out_dir) / "scan_points.csv";
  atomic_write(file, csv);
  std::printf("%zu candidate points below cost %.3g\n", points.size(), p.threshold);

  RunManifest manifest("scan-underdetermined", p.seed);
  manifest.add_input("threshold", fmt_g(p.threshold));
  manifest.add_input("sigma-fraction", fmt_g(p.sigma_fraction));
  manifest.add_output(file);
  manifest.set_wall_time_s(timer.seconds());
  manifest.write(fs::path(p.out_dir) / "run_manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// infer-apsd / infer-cpsd: Bayesian sweep against measured spectra
// ---------------------------------------------------------------------------

struct InferCmd {
  std::vector<std::string> psd_files;
  std::string phase_file;  // infer-cpsd only
  std::vector<int> phase_sites{0, 1};
  std::vector<double> sites{-50.0, 0.0, 50.0, 0.0};
  std::string observable = "voltage";
  int bins_per_decade = 0;
  double band_k = 3.0;
  int n_min = 1, n_max = 177, n_points = 13;
  double ell_min = 0.05, ell_max = 5.0;
  int ell_points = 13;
  std::vector<std::string> orientations{"ver-z", "hor-random", "fully-random"};
  std::vector<double> layer{-150.0, 150.0, -150.0, 150.0, 72.0, 72.0};
  double rate_min = 1e-5, rate_max = 1.0;
  double epsilon_r = 11.0;
  long n_mc = 1000;
  bool laplace = false;
  bool svg = false;
  uint64_t seed = 1;
  std::string out_dir = ".";
  std::string config;
};

int run_infer(const InferCmd& p, bool with_phase) {
  Timer timer;
  if (p.psd_files.empty()) throw ValidationError("at least one --psd file is required");
  if (p.layer.size() != 6) throw ValidationError("--layer needs x0,x1,y0,y1,z0,z1");

  MeasurementSet meas;
  meas.layout = layout_from_flat(p.sites);
  meas.observable = observable_from_name(p.observable);
  for (size_t i = 0; i < p.psd_files.size(); ++i)
    meas.apsd.push_back({static_cast<int>(i),
                         ingest_psd(p.psd_files[i], p.bins_per_decade, p.band_k)});
  if (with_phase) {
    if (p.phase_file.empty()) throw ValidationError("--phase file is required");
    if (p.phase_sites.size() != 2)
      throw ValidationError("--phase-sites needs two indices");
    meas.cpsd_phase = parse_phase_csv(read_file(p.phase_file));
    meas.phase_sites = {p.phase_sites[0], p.phase_sites[1]};
  }
  meas.validate();

  BoxRegion box{{p.layer[0], p.layer[1]}, {p.layer[2], p.layer[3]}, {p.layer[4], p.layer[5]}};
  std::vector<ModelHypothesis> hyps;
  const auto counts = geometric_count_grid(p.n_min, p.n_max, p.n_points);
  const auto lengths = log_length_grid(p.ell_min, p.ell_max, p.ell_points);
  for (const std::string& name : p.orientations) {
    const OrientationClass cls = orientation_from_name(name);
    for (int n : counts) {
      for (double ell : lengths) {
        ModelHypothesis h;
        h.n_tls = n;
        h.dipole_length_nm = ell;
        h.orientation = cls;
        h.layer = box;
        h.rate_interval_hz = {p.rate_min, p.rate_max};
        h.epsilon_r = p.epsilon_r;
        h.prior_weight = 1.0;
        hyps.push_back(h);
      }
    }
  }
  for (auto& h : hyps) h.prior_weight = 1.0 / static_cast<double>(hyps.size());

  const PosteriorTable table = run_inference(hyps, meas, p.n_mc, p.seed, p.laplace);
  const Expectations ex = expectations(table);

  fs::create_directories(p.out_dir);
  RunManifest manifest(with_phase ? "infer-cpsd" : "infer-apsd", p.seed);
  for (const auto& f : p.psd_files) manifest.add_input("psd", f);
  if (with_phase) manifest.add_input("phase", p.phase_file);
  manifest.add_input("n-mc", std::to_string(p.n_mc));
  manifest.add_input("band-k", fmt_g(p.band_k));

  const fs::path json_file = fs::path(p.out_dir) / "posterior.json";
  const fs::path csv_file = fs::path(p.out_dir) / "posterior.csv";
  const fs::path marginal_file = fs::path(p.out_dir) / "marginal.csv";
  atomic_write(json_file, posterior_to_json(table));
  atomic_write(csv_file, posterior_csv(table));
  atomic_write(marginal_file, marginal_grid_csv(ex));
  manifest.add_output(json_file);
  manifest.add_output(csv_file);
  manifest.add_output(marginal_file);
  if (p.svg) {
    const fs::path svg_file = fs::path(p.out_dir) / "marginal.svg";
    atomic_write(svg_file, marginal_heatmap_svg(ex));
    manifest.add_output(svg_file);
  }

  std::printf("note: %s\n", kHypothesisSetCaveat);
  std::printf("expected n_tls = %.4g, expected ell = %.4g nm\n", ex.mean_n_tls,
              ex.mean_ell_nm);
  for (const auto& b : ex.by_orientation)
    std::printf("  %s: P = %.4g, E[n_tls] = %.4g, E[ell] = %.4g nm\n",
                orientation_name(b.orientation), b.probability, b.mean_n_tls,
                b.mean_ell_nm);

  manifest.set_wall_time_s(timer.seconds());
  manifest.write(fs::path(p.out_dir) / "run_manifest.json");
  return 0;
}

// ---------------------------------------------------------------------------
// brier-eval: single-dipole mock experiment, three measurement designs
// ---------------------------------------------------------------------------

struct BrierCmd {
  int seeds = 20;
  long n_mc = 2000;
  int realizations = 20;
  int bins_per_decade = 2;
  double band_k = 3.0;
  uint64_t seed = 1;
  std::string out_dir = ".";
  std::string config;
};

int run_brier(const BrierCmd& p) {
  Timer timer;
  BrierProtocolConfig cfg;
  cfg.n_mc = p.n_mc;
  cfg.n_realizations = p.realizations;
  cfg.bins_per_decade = p.bins_per_decade;
  cfg.band_multiplier = p.band_k;

  std::string csv = "seed,one_dot,two_dots,two_samples\n";
  std::vector<double> one, two, chained;
  int rejected = 0;
  for (int s = 1; s <= p.seeds; ++s) {
    const uint64_t run_seed = Rng::derive(p.seed, {static_cast<uint64_t>(s)}).next_u64();
    try {
      const BrierOutcome out = run_brier_protocol(cfg, run_seed);
      one.push_back(out.one_dot);
      two.push_back(out.two_dots);
      chained.push_back(out.two_samples);
      csv += std::to_string(s) + "," + fmt_g(out.one_dot) + "," + fmt_g(out.two_dots) +
             "," + fmt_g(out.two_samples) + "\n";
    } catch (const AllRejected&) {
      ++rejected;
      csv += std::to_string(s) + ",nan,nan,nan\n";
    }
  }
  if (one.empty()) throw AllRejected("every seed produced an all-zero posterior");

  fs::create_directories(p.out_dir);
  const fs::path file = fs::path(p.out_dir) / "brier_scores.csv";
  atomic_write(file, csv);

  std::printf("medians over %zu seeds: one dot %.3f, two dots %.3f, two samples %.3f\n",
              one.size(), median(one), median(two), median(chained));
  if (rejected > 0) std::printf("%d seed(s) rejected every hypothesis\n", rejected);

  RunManifest manifest("brier-eval", p.seed);
  manifest.add_input("seeds", std::to_string(p.seeds));
  manifest.add_input("n-mc", std::to_string(p.n_mc));
  manifest.add_output(file);
  manifest.set_wall_time_s(timer.seconds());
  manifest.write(fs::path(p.out_dir) / "run_manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TLS charge-noise simulator and Bayesian inference toolkit"};
  app.require_subcommand(1);

  ContinuumCmd continuum_p;
  auto* c_cmd = app.add_subcommand("continuum", "Layer-integral sweep over separation");
  c_cmd->set_help_flag("--help", "print help");  // frees -h for the layer height
  c_cmd->add_option("--R", continuum_p.R, "disc radius (nm)");
  c_cmd->add_option("--h", continuum_p.h, "layer height (nm)");
  c_cmd->add_option("--d-min", continuum_p.d_min, "smallest separation (nm)");
  c_cmd->add_option("--d-max", continuum_p.d_max, "largest separation (nm)");
  c_cmd->add_option("--steps", continuum_p.steps, "sweep points");
  c_cmd->add_option("--seed", continuum_p.seed, "rng seed (recorded)");
  c_cmd->add_option("--out-dir", continuum_p.out_dir, "output directory");
  c_cmd->add_option("--config", continuum_p.config, "JSON run config");

  SpectraCmd spectra_p;
  auto* sp_cmd = app.add_subcommand("spectra", "Analytic APSD/CPSD of a configuration");
  sp_cmd->add_option("--tls-config", spectra_p.tls_config, "TLS configuration JSON")
      ->required();
  sp_cmd->add_option("--sites", spectra_p.sites, "site coordinates x1,y1,x2,y2,...")
      ->delimiter(',');
  sp_cmd->add_option("--observable", spectra_p.observable, "voltage|ex|ey|ez");
  sp_cmd->add_option("--f-min", spectra_p.f_min, "grid start (Hz)");
  sp_cmd->add_option("--f-max", spectra_p.f_max, "grid end (Hz)");
  sp_cmd->add_option("--points", spectra_p.points, "grid points");
  sp_cmd->add_option("--seed", spectra_p.seed, "rng seed (recorded)");
  sp_cmd->add_option("--out-dir", spectra_p.out_dir, "output directory");
  sp_cmd->add_option("--config", spectra_p.config, "JSON run config");

  SimulateCmd simulate_p;
  auto* sim_cmd = app.add_subcommand("simulate", "Telegraph synthesis and FFT estimates");
  sim_cmd->add_option("--tls-config", simulate_p.tls_config, "TLS configuration JSON")
      ->required();
  sim_cmd->add_option("--sites", simulate_p.sites, "site coordinates x1,y1,...")
      ->delimiter(',');
  sim_cmd->add_option("--observable", simulate_p.observable, "voltage|ex|ey|ez");
  sim_cmd->add_option("--duration", simulate_p.duration, "record length (s)");
  sim_cmd->add_option("--dt", simulate_p.dt, "sample interval (s)");
  sim_cmd->add_option("--realizations", simulate_p.realizations, "averaged records");
  sim_cmd->add_flag("--write-records", simulate_p.write_records,
                    "also write the first realization per site");
  sim_cmd->add_option("--seed", simulate_p.seed, "rng seed");
  sim_cmd->add_option("--out-dir", simulate_p.out_dir, "output directory");
  sim_cmd->add_option("--config", simulate_p.config, "JSON run config");

  ScanCmd scan_p;
  auto* scan_cmd = app.add_subcommand(
      "scan-underdetermined", "Grid scan of a wrong-assumption model family");
  scan_cmd->add_option("--truth-pos", scan_p.truth_pos, "true dipole x,y,z (nm)")
      ->delimiter(',');
  scan_cmd->add_option("--truth-orient", scan_p.truth_orient, "true dipole axis")
      ->delimiter(',');
  scan_cmd->add_option("--truth-moment", scan_p.truth_moment, "true moment (e nm)");
  scan_cmd->add_option("--switch-rate", scan_p.switch_rate, "switch rate (Hz)");
  scan_cmd->add_option("--assume-orient", scan_p.assume_orient, "assumed dipole axis")
      ->delimiter(',');
  scan_cmd->add_option("--height", scan_p.height, "assumed layer height (nm)");
  scan_cmd->add_option("--x-min", scan_p.x_min, "candidate x start");
  scan_cmd->add_option("--x-max", scan_p.x_max, "candidate x end");
  scan_cmd->add_option("--x-steps", scan_p.x_steps, "candidate x points");
  scan_cmd->add_option("--y-min", scan_p.y_min, "candidate y start");
  scan_cmd->add_option("--y-max", scan_p.y_max, "candidate y end");
  scan_cmd->add_option("--y-steps", scan_p.y_steps, "candidate y points");
  scan_cmd->add_option("--p-min", scan_p.p_min, "candidate moment start (e nm)");
  scan_cmd->add_option("--p-max", scan_p.p_max, "candidate moment end (e nm)");
  scan_cmd->add_option("--p-steps", scan_p.p_steps, "candidate moment points (1 = fixed)");
  scan_cmd->add_option("--threshold", scan_p.threshold, "cost threshold");
  scan_cmd->add_option("--sigma-fraction", scan_p.sigma_fraction,
                       "sigma(f) as a fraction of the measured PSD");
  scan_cmd->add_option("--f-min", scan_p.f_min, "cost band start (Hz)");
  scan_cmd->add_option("--f-max", scan_p.f_max, "cost band end (Hz)");
  scan_cmd->add_option("--f-points", scan_p.f_points, "cost grid points");
  scan_cmd->add_option("--sites", scan_p.sites, "site coordinates")->delimiter(',');
  scan_cmd->add_option("--epsilon-r", scan_p.epsilon_r, "relative dielectric constant");
  scan_cmd->add_option("--seed", scan_p.seed, "rng seed (recorded)");
  scan_cmd->add_option("--out-dir", scan_p.out_dir, "output directory");
  scan_cmd->add_option("--config", scan_p.config, "JSON run config");

  InferCmd infer_p;
  auto* ia_cmd = app.add_subcommand("infer-apsd", "Bayesian sweep against binned APSDs");
  auto* ic_cmd = app.add_subcommand(
      "infer-cpsd", "Bayesian sweep against binned APSDs plus CPSD phases");
  for (auto* cmd : {ia_cmd, ic_cmd}) {
    cmd->add_option("--psd", infer_p.psd_files, "binned APSD CSV, one per site")
        ->required();
    cmd->add_option("--sites", infer_p.sites, "site coordinates")->delimiter(',');
    cmd->add_option("--observable", infer_p.observable, "voltage|ex|ey|ez");
    cmd->add_option("--bins-per-decade", infer_p.bins_per_decade,
                    "re-bin raw spectra at this density (0 = require sigma column)");
    cmd->add_option("--band-k", infer_p.band_k, "acceptance band multiplier");
    cmd->add_option("--n-min", infer_p.n_min, "count grid start");
    cmd->add_option("--n-max", infer_p.n_max, "count grid end");
    cmd->add_option("--n-points", infer_p.n_points, "count grid points");
    cmd->add_option("--ell-min", infer_p.ell_min, "length grid start (nm)");
    cmd->add_option("--ell-max", infer_p.ell_max, "length grid end (nm)");
    cmd->add_option("--ell-points", infer_p.ell_points, "length grid points");
    cmd->add_option("--orientations", infer_p.orientations,
                    "orientation classes to sweep")
        ->delimiter(',');
    cmd->add_option("--layer", infer_p.layer, "layer box x0,x1,y0,y1,z0,z1 (nm)")
        ->delimiter(',');
    cmd->add_option("--rate-min", infer_p.rate_min, "switch rate lower bound (Hz)");
    cmd->add_option("--rate-max", infer_p.rate_max, "switch rate upper bound (Hz)");
    cmd->add_option("--epsilon-r", infer_p.epsilon_r, "relative dielectric constant");
    cmd->add_option("--n-mc", infer_p.n_mc, "Monte Carlo draws per hypothesis");
    cmd->add_flag("--laplace", infer_p.laplace, "Laplace-smooth zero-success counts");
    cmd->add_flag("--svg", infer_p.svg, "emit a marginal heatmap SVG");
    cmd->add_option("--seed", infer_p.seed, "rng seed");
    cmd->add_option("--out-dir", infer_p.out_dir, "output directory");
    cmd->add_option("--config", infer_p.config, "JSON run config");
  }
  ic_cmd->add_option("--phase", infer_p.phase_file, "CPSD phase observations CSV")
      ->required();
  ic_cmd->add_option("--phase-sites", infer_p.phase_sites, "pair of site indices")
      ->delimiter(',');

  BrierCmd brier_p;
  auto* b_cmd = app.add_subcommand("brier-eval",
                                   "Mock single-dipole experiment, Brier-scored");
  b_cmd->add_option("--seeds", brier_p.seeds, "number of repetitions");
  b_cmd->add_option("--n-mc", brier_p.n_mc, "Monte Carlo draws per hypothesis");
  b_cmd->add_option("--realizations", brier_p.realizations, "averaged records");
  b_cmd->add_option("--bins-per-decade", brier_p.bins_per_decade, "measurement binning");
  b_cmd->add_option("--band-k", brier_p.band_k, "acceptance band multiplier");
  b_cmd->add_option("--seed", brier_p.seed, "base rng seed");
  b_cmd->add_option("--out-dir", brier_p.out_dir, "output directory");
  b_cmd->add_option("--config", brier_p.config, "JSON run config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(c_cmd)) {
      ConfigApplier cfg(c_cmd, continuum_p.config);
      cfg.apply("--R", continuum_p.R);
      cfg.apply("--h", continuum_p.h);
      cfg.apply("--d-min", continuum_p.d_min);
      cfg.apply("--d-max", continuum_p.d_max);
      cfg.apply("--steps", continuum_p.steps);
      cfg.apply("--seed", continuum_p.seed);
      cfg.apply("--out-dir", continuum_p.out_dir);
      cfg.finish();
      return run_continuum(continuum_p);
    }
    if (app.got_subcommand(sp_cmd)) {
      ConfigApplier cfg(sp_cmd, spectra_p.config);
      cfg.apply("--tls-config", spectra_p.tls_config);
      cfg.apply("--sites", spectra_p.sites);
      cfg.apply("--observable", spectra_p.observable);
      cfg.apply("--f-min", spectra_p.f_min);
      cfg.apply("--f-max", spectra_p.f_max);
      cfg.apply("--points", spectra_p.points);
      cfg.apply("--seed", spectra_p.seed);
      cfg.apply("--out-dir", spectra_p.out_dir);
      cfg.finish();
      return run_spectra(spectra_p);
    }
    if (app.got_subcommand(sim_cmd)) {
      ConfigApplier cfg(sim_cmd, simulate_p.config);
      cfg.apply("--tls-config", simulate_p.tls_config);
      cfg.apply("--sites", simulate_p.sites);
      cfg.apply("--observable", simulate_p.observable);
      cfg.apply("--duration", simulate_p.duration);
      cfg.apply("--dt", simulate_p.dt);
      cfg.apply("--realizations", simulate_p.realizations);
      cfg.apply("--write-records", simulate_p.write_records);
      cfg.apply("--seed", simulate_p.seed);
      cfg.apply("--out-dir", simulate_p.out_dir);
      cfg.finish();
      return run_simulate(simulate_p);
    }
    if (app.got_subcommand(scan_cmd)) {
      ConfigApplier cfg(scan_cmd, scan_p.config);
      cfg.apply("--truth-pos", scan_p.truth_pos);
      cfg.apply("--truth-orient", scan_p.truth_orient);
      cfg.apply("--truth-moment", scan_p.truth_moment);
      cfg.apply("--switch-rate", scan_p.switch_rate);
      cfg.apply("--assume-orient", scan_p.assume_orient);
      cfg.apply("--height", scan_p.height);
      cfg.apply("--x-min", scan_p.x_min);
      cfg.apply("--x-max", scan_p.x_max);
      cfg.apply("--x-steps", scan_p.x_steps);
      cfg.apply("--y-min", scan_p.y_min);
      cfg.apply("--y-max", scan_p.y_max);
      cfg.apply("--y-steps", scan_p.y_steps);
      cfg.apply("--p-min", scan_p.p_min);
      cfg.apply("--p-max", scan_p.p_max);
      cfg.apply("--p-steps", scan_p.p_steps);
      cfg.apply("--threshold", scan_p.threshold);
      cfg.apply("--sigma-fraction", scan_p.sigma_fraction);
      cfg.apply("--f-min", scan_p.f_min);
      cfg.apply("--f-max", scan_p.f_max);
      cfg.apply("--f-points", scan_p.f_points);
      cfg.apply("--sites", scan_p.sites);
      cfg.apply("--epsilon-r", scan_p.epsilon_r);
      cfg.apply("--seed", scan_p.seed);
      cfg.apply("--out-dir", scan_p.out_dir);
      cfg.finish();
      return run_scan(scan_p);
    }
    for (auto* cmd : {ia_cmd, ic_cmd}) {
      if (!app.got_subcommand(cmd)) continue;
      ConfigApplier cfg(cmd, infer_p.config);
      cfg.apply("--psd", infer_p.psd_files);
      cfg.apply("--sites", infer_p.sites);
      cfg.apply("--observable", infer_p.observable);
      cfg.apply("--bins-per-decade", infer_p.bins_per_decade);
      cfg.apply("--band-k", infer_p.band_k);
      cfg.apply("--n-min", infer_p.n_min);
      cfg.apply("--n-max", infer_p.n_max);
      cfg.apply("--n-points", infer_p.n_points);
      cfg.apply("--ell-min", infer_p.ell_min);
      cfg.apply("--ell-max", infer_p.ell_max);
      cfg.apply("--ell-points", infer_p.ell_points);
      cfg.apply("--orientations", infer_p.orientations);
      cfg.apply("--layer", infer_p.layer);
      cfg.apply("--rate-min", infer_p.rate_min);
      cfg.apply("--rate-max", infer_p.rate_max);
      cfg.apply("--epsilon-r", infer_p.epsilon_r);
      cfg.apply("--n-mc", infer_p.n_mc);
      cfg.apply("--laplace", infer_p.laplace);
      cfg.apply("--svg", infer_p.svg);
      cfg.apply("--seed", infer_p.seed);
      cfg.apply("--out-dir", infer_p.out_dir);
      if (cmd == ic_cmd) {
        cfg.apply("--phase", infer_p.phase_file);
        cfg.apply("--phase-sites", infer_p.phase_sites);
      }
      cfg.finish();
      return run_infer(infer_p, cmd == ic_cmd);
    }
    if (app.got_subcommand(b_cmd)) {
      ConfigApplier cfg(b_cmd, brier_p.config);
      cfg.apply("--seeds", brier_p.seeds);
      cfg.apply("--n-mc", brier_p.n_mc);
      cfg.apply("--realizations", brier_p.realizations);
      cfg.apply("--bins-per-decade", brier_p.bins_per_decade);
      cfg.apply("--band-k", brier_p.band_k);
      cfg.apply("--seed", brier_p.seed);
      cfg.apply("--out-dir", brier_p.out_dir);
      cfg.finish();
      return run_brier(brier_p);
    }
  } catch (const AllRejected& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
