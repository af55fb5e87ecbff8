#pragma once
#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tlsnoise/inference.hpp"
#include "tlsnoise/spectra.hpp"
#include "tlsnoise/telegraph.hpp"

namespace tlsnoise {

// CSV schemas (header row mandatory):
//   SpectrumSeries      frequency_hz,value
//   CrossSpectrum       frequency_hz,re,im,strength,phase
//   EstimatedSpectrum   the same plus a trailing n_realizations column
//   records             time_s,value_0,value_1,...
//   BinnedSpectrum in   frequency_hz,psd,sigma   (or frequency_hz,psd raw)

std::string spectrum_csv(const SpectrumSeries& s);
std::string cross_spectrum_csv(const CrossSpectrum& c);
std::string estimated_apsd_csv(const EstimatedSpectrum& e);
std::string estimated_cpsd_csv(const CrossSpectrum& c, int n_realizations);
std::string records_csv(const TimeSeriesSpec& spec,
                        const std::vector<std::vector<double>>& per_site_one_realization);
std::string posterior_csv(const PosteriorTable& table);
std::string marginal_grid_csv(const Expectations& ex);
std::string continuum_sweep_csv(const std::vector<std::array<double, 5>>& rows);

// Minimal grayscale heatmap of the (n_tls, ell) marginal.
std::string marginal_heatmap_svg(const Expectations& ex);

// Parse a binned spectrum CSV with header frequency_hz,psd,sigma.
BinnedSpectrum parse_binned_csv(const std::string& text, double band_multiplier = 3.0);

// Parse raw frequency_hz,psd rows and re-bin into log-spaced bins with
// per-bin mean and standard deviation.
BinnedSpectrum rebin_raw_csv(const std::string& text, int bins_per_decade,
                             double band_multiplier = 3.0);

// Re-bin already-loaded raw points (increasing frequency required).
BinnedSpectrum rebin_raw(const std::vector<std::pair<double, double>>& raw,
                         int bins_per_decade, double band_multiplier = 3.0);

// File front end used by the CLI: reads the file, picks the parser from the
// header, re-binning raw files when bins_per_decade > 0 and failing otherwise.
BinnedSpectrum ingest_psd(const std::filesystem::path& file, int bins_per_decade = 0,
                          double band_multiplier = 3.0);

// Phase observation CSV with header frequency_hz,phase (phase is 0 or pi,
// accepted as 0, 3.14159..., or the word pi).
std::vector<PhaseObservation> parse_phase_csv(const std::string& text);

// TlsConfiguration JSON document:
//   {"epsilon_r": number,
//    "tls": [{"pos":[x,y,z],"orient":[ux,uy,uz],
//             "moment_e_nm": number, "switch_rate_hz": number}]}
// Serialization emits fields in exactly that order; parsing rejects unknown
// fields and validates the result.
std::string configuration_to_json(const TlsConfiguration& config);
TlsConfiguration configuration_from_json(const std::string& text);

std::string posterior_to_json(const PosteriorTable& table);

// Write-to-temp-then-rename, so partially written outputs never appear.
void atomic_write(const std::filesystem::path& file, const std::string& content);

std::string read_file(const std::filesystem::path& file);

// FNV-1a 64-bit content hash, as 16 hex digits.
std::string fnv1a64_hex(const std::string& content);

// Run manifest accompanying every CLI run: inputs, seed, version, wall time,
// and each output file with its content hash.
class RunManifest {
 public:
  RunManifest(std::string command, uint64_t seed);
  void add_input(const std::string& key, const std::string& value);
  void add_output(const std::filesystem::path& file);  // hashes current content
  void set_wall_time_s(double seconds);
  std::string to_json() const;
  void write(const std::filesystem::path& file) const;

 private:
  std::string command_;
  uint64_t seed_;
  double wall_time_s_{0.0};
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;  // path, hash
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tlsnoise
