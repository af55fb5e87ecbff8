#include "tlsnoise/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "tlsnoise/errors.hpp"

namespace tlsnoise {

namespace {

// Shortest round-trip representation of a double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s, long line_no) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw ParseError("trailing characters in number", line_no);
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'", line_no);
  }
}

// Header plus data rows; skips blank lines, keeps line numbers for errors.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::pair<long, std::vector<std::string>>> rows;
};

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::stringstream ss(text);
  std::string line;
  long line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (table.header.empty())
      table.header = split_line(line);
    else
      table.rows.emplace_back(line_no, split_line(line));
  }
  if (table.header.empty()) throw ParseError("missing CSV header");
  return table;
}

void expect_header(const CsvTable& table, const std::vector<std::string>& expected) {
  if (table.header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw ParseError("unexpected CSV header; expected '" + want + "'", 1);
  }
}

}  // namespace

std::string spectrum_csv(const SpectrumSeries& s) {
  std::string out = "frequency_hz,value\n";
  for (size_t i = 0; i < s.grid.size(); ++i)
    out += fmt(s.grid.values[i]) + "," + fmt(s.values[i]) + "\n";
  return out;
}

std::string cross_spectrum_csv(const CrossSpectrum& c) {
  std::string out = "frequency_hz,re,im,strength,phase\n";
  for (size_t i = 0; i < c.grid.size(); ++i)
    out += fmt(c.grid.values[i]) + "," + fmt(c.values[i].real()) + "," +
           fmt(c.values[i].imag()) + "," + fmt(c.strength[i]) + "," +
           fmt(c.phase[i]) + "\n";
  return out;
}

std::string estimated_apsd_csv(const EstimatedSpectrum& e) {
  std::string out = "frequency_hz,value,n_realizations\n";
  for (size_t i = 0; i < e.grid.size(); ++i)
    out += fmt(e.grid.values[i]) + "," + fmt(e.apsd[i]) + "," +
           std::to_string(e.n_realizations) + "\n";
  return out;
}

std::string estimated_cpsd_csv(const CrossSpectrum& c, int n_realizations) {
  std::string out = "frequency_hz,re,im,strength,phase,n_realizations\n";
  for (size_t i = 0; i < c.grid.size(); ++i)
    out += fmt(c.grid.values[i]) + "," + fmt(c.values[i].real()) + "," +
           fmt(c.values[i].imag()) + "," + fmt(c.strength[i]) + "," +
           fmt(c.phase[i]) + "," + std::to_string(n_realizations) + "\n";
  return out;
}

std::string records_csv(const TimeSeriesSpec& spec,
                        const std::vector<std::vector<double>>& per_site) {
  std::string out = "time_s";
  for (size_t s = 0; s < per_site.size(); ++s) out += ",value_" + std::to_string(s);
  out += "\n";
  const size_t n = spec.n_samples();
  for (size_t k = 0; k < n; ++k) {
    out += fmt(static_cast<double>(k) * spec.sample_interval_s);
    for (const auto& rec : per_site) out += "," + fmt(rec[k]);
    out += "\n";
  }
  return out;
}

std::string posterior_csv(const PosteriorTable& table) {
  std::string out = "n_tls,ell_nm,orientation,likelihood,posterior\n";
  for (const PosteriorEntry& e : table.entries)
    out += std::to_string(e.hypothesis.n_tls) + "," +
           fmt(e.hypothesis.dipole_length_nm) + "," +
           orientation_name(e.hypothesis.orientation) + "," + fmt(e.likelihood) +
           "," + fmt(e.posterior) + "\n";
  return out;
}

std::string marginal_grid_csv(const Expectations& ex) {
  std::string out = "n_tls,ell_nm,probability\n";
  for (const JointCell& cell : ex.joint)
    out += std::to_string(cell.n_tls) + "," + fmt(cell.ell_nm) + "," +
           fmt(cell.probability) + "\n";
  return out;
}

std::string continuum_sweep_csv(const std::vector<std::array<double, 5>>& rows) {
  std::string out = "d_nm,a_x,a_y,a_z,a_r\n";
  for (const auto& r : rows)
    out += fmt(r[0]) + "," + fmt(r[1]) + "," + fmt(r[2]) + "," + fmt(r[3]) + "," +
           fmt(r[4]) + "\n";
  return out;
}

std::string marginal_heatmap_svg(const Expectations& ex) {
  // Collect the axes.
  std::vector<int> ns;
  std::vector<double> ells;
  double max_p = 0.0;
  for (const JointCell& c : ex.joint) {
    if (ns.empty() || ns.back() != c.n_tls) {
      if (std::find(ns.begin(), ns.end(), c.n_tls) == ns.end()) ns.push_back(c.n_tls);
    }
    if (std::find(ells.begin(), ells.end(), c.ell_nm) == ells.end())
      ells.push_back(c.ell_nm);
    max_p = std::max(max_p, c.probability);
  }
  std::sort(ns.begin(), ns.end());
  std::sort(ells.begin(), ells.end());
  const int cell = 18, margin = 4;
  const int width = margin * 2 + cell * static_cast<int>(ns.size());
  const int height = margin * 2 + cell * static_cast<int>(ells.size());
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(width) + "\" height=\"" + std::to_string(height) +
                    "\">\n";
  for (const JointCell& c : ex.joint) {
    const auto ix = std::find(ns.begin(), ns.end(), c.n_tls) - ns.begin();
    const auto iy = std::find(ells.begin(), ells.end(), c.ell_nm) - ells.begin();
    const int shade =
        max_p > 0.0 ? static_cast<int>(255.0 * (1.0 - c.probability / max_p)) : 255;
    svg += "  <rect x=\"" + std::to_string(margin + cell * ix) + "\" y=\"" +
           std::to_string(height - margin - cell * (iy + 1)) + "\" width=\"" +
           std::to_string(cell) + "\" height=\"" + std::to_string(cell) +
           "\" fill=\"rgb(" + std::to_string(shade) + "," + std::to_string(shade) +
           ",255)\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

BinnedSpectrum parse_binned_csv(const std::string& text, double band_multiplier) {
  const CsvTable table = parse_csv(text);
  expect_header(table, {"frequency_hz", "psd", "sigma"});
  BinnedSpectrum out;
  out.band_multiplier = band_multiplier;
  for (const auto& [line_no, fields] : table.rows) {
    if (fields.size() != 3) throw ParseError("expected 3 columns", line_no);
    SpectrumBin bin{parse_double(fields[0], line_no), parse_double(fields[1], line_no),
                    parse_double(fields[2], line_no)};
    if (!(bin.sigma > 0.0)) throw ParseError("sigma must be > 0", line_no);
    if (!out.bins.empty() && bin.f_center_hz <= out.bins.back().f_center_hz)
      throw ParseError("frequencies must be strictly increasing", line_no);
    out.bins.push_back(bin);
  }
  out.validate();
  return out;
}

BinnedSpectrum rebin_raw(const std::vector<std::pair<double, double>>& raw,
                         int bins_per_decade, double band_multiplier) {
  if (bins_per_decade < 1) throw ValidationError("need bins_per_decade >= 1");
  if (raw.size() < 2) throw ValidationError("need at least two raw points");
  for (size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i].first > 0.0)) throw ValidationError("raw frequencies must be > 0");
    if (i > 0 && raw[i].first <= raw[i - 1].first)
      throw ValidationError("raw frequencies must be strictly increasing");
  }

  const double log_step = std::numbers::ln10 / bins_per_decade;
  const double log_lo = std::log(raw.front().first);
  BinnedSpectrum out;
  out.band_multiplier = band_multiplier;

  size_t i = 0;
  while (i < raw.size()) {
    const long bin_index =
        static_cast<long>(std::floor((std::log(raw[i].first) - log_lo) / log_step + 1e-12));
    const double hi = log_lo + log_step * static_cast<double>(bin_index + 1);
    double sum = 0.0, sum2 = 0.0, log_center = 0.0;
    size_t count = 0;
    while (i < raw.size() && std::log(raw[i].first) < hi - 1e-12) {
      sum += raw[i].second;
      sum2 += raw[i].second * raw[i].second;
      log_center += std::log(raw[i].first);
      ++count;
      ++i;
    }
    if (count == 0) {  // bin with no points; skip forward
      ++i;
      continue;
    }
    const double mean = sum / static_cast<double>(count);
    const double var =
        count > 1 ? std::max(0.0, (sum2 - sum * mean) / static_cast<double>(count - 1))
                  : 0.0;
    SpectrumBin bin;
    bin.f_center_hz = std::exp(log_center / static_cast<double>(count));
    bin.mean = mean;
    // A singleton bin has no spread estimate; fall back to a nominal 10%.
    bin.sigma = var > 0.0 ? std::sqrt(var) : std::max(1e-300, 0.1 * std::abs(mean));
    out.bins.push_back(bin);
  }
  out.validate();
  return out;
}

BinnedSpectrum rebin_raw_csv(const std::string& text, int bins_per_decade,
                             double band_multiplier) {
  const CsvTable table = parse_csv(text);
  expect_header(table, {"frequency_hz", "psd"});
  std::vector<std::pair<double, double>> raw;
  for (const auto& [line_no, fields] : table.rows) {
    if (fields.size() != 2) throw ParseError("expected 2 columns", line_no);
    raw.emplace_back(parse_double(fields[0], line_no), parse_double(fields[1], line_no));
    if (raw.size() > 1 && raw.back().first <= raw[raw.size() - 2].first)
      throw ParseError("frequencies must be strictly increasing", line_no);
  }
  return rebin_raw(raw, bins_per_decade, band_multiplier);
}

BinnedSpectrum ingest_psd(const std::filesystem::path& file, int bins_per_decade,
                          double band_multiplier) {
  const std::string text = read_file(file);
  const CsvTable table = parse_csv(text);
  if (table.header == std::vector<std::string>{"frequency_hz", "psd", "sigma"})
    return parse_binned_csv(text, band_multiplier);
  if (table.header == std::vector<std::string>{"frequency_hz", "psd"}) {
    if (bins_per_decade < 1)
      throw ParseError(
          "raw spectrum (no sigma column) requires re-binning; pass bins-per-decade", 1);
    return rebin_raw_csv(text, bins_per_decade, band_multiplier);
  }
  throw ParseError("unrecognized spectrum header in " + file.string(), 1);
}

std::vector<PhaseObservation> parse_phase_csv(const std::string& text) {
  const CsvTable table = parse_csv(text);
  expect_header(table, {"frequency_hz", "phase"});
  std::vector<PhaseObservation> out;
  for (const auto& [line_no, fields] : table.rows) {
    if (fields.size() != 2) throw ParseError("expected 2 columns", line_no);
    PhaseObservation obs;
    obs.f_center_hz = parse_double(fields[0], line_no);
    if (fields[1] == "pi")
      obs.phase = std::numbers::pi;
    else
      obs.phase = parse_double(fields[1], line_no);
    if (std::abs(obs.phase) > 1e-9 && std::abs(obs.phase - std::numbers::pi) > 1e-6)
      throw ParseError("phase must be 0 or pi", line_no);
    if (!out.empty() && obs.f_center_hz <= out.back().f_center_hz)
      throw ParseError("frequencies must be strictly increasing", line_no);
    out.push_back(obs);
  }
  return out;
}

std::string configuration_to_json(const TlsConfiguration& config) {
  nlohmann::ordered_json doc;
  doc["epsilon_r"] = config.epsilon_r;
  doc["tls"] = nlohmann::ordered_json::array();
  for (const Tls& t : config.tls) {
    nlohmann::ordered_json entry;
    entry["pos"] = {t.position.x, t.position.y, t.position.z};
    entry["orient"] = {t.orientation.x, t.orientation.y, t.orientation.z};
    entry["moment_e_nm"] = t.moment_e_nm;
    entry["switch_rate_hz"] = t.switch_rate_hz;
    doc["tls"].push_back(entry);
  }
  return doc.dump(2) + "\n";
}

namespace {

Vec3 vec3_from_json(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array() || arr.size() != 3)
    throw ParseError(std::string(what) + " must be a 3-element array");
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

void reject_extra_fields(const nlohmann::json& obj,
                         const std::vector<std::string>& allowed) {
  for (const auto& [key, value] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParseError("unexpected field '" + key + "'");
}

}  // namespace

TlsConfiguration configuration_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("configuration must be a JSON object");
  reject_extra_fields(doc, {"epsilon_r", "tls"});
  if (!doc.contains("epsilon_r") || !doc.contains("tls"))
    throw ParseError("configuration needs epsilon_r and tls");

  TlsConfiguration config;
  config.epsilon_r = doc["epsilon_r"].get<double>();
  for (const auto& entry : doc["tls"]) {
    reject_extra_fields(entry, {"pos", "orient", "moment_e_nm", "switch_rate_hz"});
    Tls t;
    t.position = vec3_from_json(entry.at("pos"), "pos");
    t.orientation = vec3_from_json(entry.at("orient"), "orient");
    t.moment_e_nm = entry.at("moment_e_nm").get<double>();
    t.switch_rate_hz = entry.at("switch_rate_hz").get<double>();
    config.tls.push_back(t);
  }
  config.validate();
  return config;
}

std::string posterior_to_json(const PosteriorTable& table) {
  nlohmann::ordered_json doc;
  doc["note"] = kHypothesisSetCaveat;
  doc["n_mc"] = table.n_mc;
  doc["rng_seed"] = table.rng_seed;
  doc["entries"] = nlohmann::ordered_json::array();
  for (const PosteriorEntry& e : table.entries) {
    nlohmann::ordered_json entry;
    entry["n_tls"] = e.hypothesis.n_tls;
    entry["ell_nm"] = e.hypothesis.dipole_length_nm;
    entry["orientation"] = orientation_name(e.hypothesis.orientation);
    entry["prior"] = e.hypothesis.prior_weight;
    entry["likelihood"] = e.likelihood;
    entry["posterior"] = e.posterior;
    doc["entries"].push_back(entry);
  }
  return doc.dump(2) + "\n";
}

void atomic_write(const std::filesystem::path& file, const std::string& content) {
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a64_hex(const std::string& content) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : content) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

RunManifest::RunManifest(std::string command, uint64_t seed)
    : command_(std::move(command)), seed_(seed) {}

void RunManifest::add_input(const std::string& key, const std::string& value) {
  inputs_.emplace_back(key, value);
}

void RunManifest::add_output(const std::filesystem::path& file) {
  outputs_.emplace_back(file.string(), fnv1a64_hex(read_file(file)));
}

void RunManifest::set_wall_time_s(double seconds) { wall_time_s_ = seconds; }

std::string RunManifest::to_json() const {
  nlohmann::ordered_json doc;
  doc["command"] = command_;
  doc["version"] = kVersion;
  doc["seed"] = seed_;
  doc["wall_time_s"] = wall_time_s_;
  doc["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : inputs_) doc["inputs"][k] = v;
  doc["outputs"] = nlohmann::ordered_json::array();
  for (const auto& [path, hash] : outputs_) {
    nlohmann::ordered_json entry;
    entry["path"] = path;
    entry["fnv1a64"] = hash;
    doc["outputs"].push_back(entry);
  }
  return doc.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& file) const {
  atomic_write(file, to_json());
}

}  // namespace tlsnoise
