// End-to-end checks of the command-line tool: reproducibility of outputs,
// exit codes, and manifest completeness. The binary path arrives as the last
// argument (wired up by ctest).
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tlsnoise/io.hpp"

namespace fs = std::filesystem;
using namespace tlsnoise;

namespace {

std::string g_cli;

int run(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tlsnoise_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("continuum runs are byte-identical and find the sign change") {
  const fs::path dir1 = fresh_dir("cont1");
  const fs::path dir2 = fresh_dir("cont2");
  const std::string flags = "continuum --R 100 --h 50 --d-max 150 --steps 31 --seed 5";
  REQUIRE(run(flags + " --out-dir " + dir1.string()) == 0);
  REQUIRE(run(flags + " --out-dir " + dir2.string()) == 0);

  const std::string csv1 = read_file(dir1 / "continuum_sweep.csv");
  const std::string csv2 = read_file(dir2 / "continuum_sweep.csv");
  CHECK(csv1 == csv2);

  // a_x column changes sign across the sweep (near 73 nm for this geometry)
  double last_positive = 0.0, first_negative = 0.0;
  std::istringstream ss(csv1);
  std::string line;
  std::getline(ss, line);  // header
  while (std::getline(ss, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double d = std::stod(line.substr(0, c1));
    const double ax = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    if (ax > 0.0) last_positive = d;
    if (ax < 0.0 && first_negative == 0.0) first_negative = d;
  }
  CHECK(last_positive > 0.0);
  CHECK(first_negative > last_positive);
  CHECK(last_positive < 73.0);
  CHECK(first_negative > 71.0);

  // manifest lists the sweep with a hash that matches the file content
  const std::string manifest = read_file(dir1 / "run_manifest.json");
  CHECK(manifest.find("continuum_sweep.csv") != std::string::npos);
  CHECK(manifest.find(fnv1a64_hex(csv1)) != std::string::npos);

  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("spectra command writes analytic APSD and CPSD files") {
  const fs::path dir = fresh_dir("spectra");
  TlsConfiguration config;
  config.epsilon_r = 11.0;
  config.tls.push_back({{30.0, -20.0, 72.0}, {0.0, 0.0, 1.0}, 1.0, 1e-3});
  config.tls.push_back({{-10.0, 40.0, 72.0}, {1.0, 0.0, 0.0}, 1.0, 1e-2});
  atomic_write(dir / "config.json", configuration_to_json(config));

  REQUIRE(run("spectra --tls-config " + (dir / "config.json").string() +
              " --points 61 --out-dir " + dir.string()) == 0);
  CHECK(fs::exists(dir / "apsd_site0.csv"));
  CHECK(fs::exists(dir / "apsd_site1.csv"));
  CHECK(fs::exists(dir / "cpsd_0_1.csv"));
  const std::string cpsd = read_file(dir / "cpsd_0_1.csv");
  CHECK(cpsd.rfind("frequency_hz,re,im,strength,phase\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("config file fills defaults and the command line overrides it") {
  const fs::path dir = fresh_dir("cfg");
  atomic_write(dir / "run.json",
               "{\"R\": 100, \"h\": 50, \"d-max\": 150, \"steps\": 11, \"out-dir\": \"" +
                   dir.string() + "\"}");
  REQUIRE(run("continuum --config " + (dir / "run.json").string() + " --steps 5") == 0);
  std::istringstream ss(read_file(dir / "continuum_sweep.csv"));
  std::string line;
  int rows = -1;  // header
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == 5);  // CLI overrode the file's 11

  // unknown config keys are rejected
  atomic_write(dir / "bad.json", "{\"radius\": 100}");
  CHECK(run("continuum --config " + (dir / "bad.json").string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("validation failures exit 2, all-rejected posteriors exit 3") {
  CHECK(run("continuum --no-such-flag 1") == 2);
  CHECK(run("spectra --tls-config /nonexistent.json") == 2);

  const fs::path dir = fresh_dir("infer");
  // a measured band no non-negative spectrum can enter
  atomic_write(dir / "psd.csv", "frequency_hz,psd,sigma\n1e-3,-5.0,0.001\n");
  CHECK(run("infer-apsd --psd " + (dir / "psd.csv").string() +
            " --n-points 3 --ell-points 3 --orientations ver-z --n-mc 50 --seed 3"
            " --out-dir " + dir.string()) == 3);
  fs::remove_all(dir);
}

TEST_CASE("infer-apsd produces posterior files, marginal grid, and manifest") {
  const fs::path dir = fresh_dir("infer_ok");
  // generous bands so the run accepts virtually everything
  atomic_write(dir / "psd.csv",
               "frequency_hz,psd,sigma\n1e-4,1e-8,1e-2\n1e-3,1e-9,1e-2\n1e-2,1e-10,1e-2\n");
  REQUIRE(run("infer-apsd --psd " + (dir / "psd.csv").string() +
              " --n-points 3 --n-max 10 --ell-points 2 --orientations ver-z"
              " --n-mc 40 --seed 9 --svg --out-dir " + dir.string()) == 0);
  CHECK(fs::exists(dir / "posterior.json"));
  CHECK(fs::exists(dir / "posterior.csv"));
  CHECK(fs::exists(dir / "marginal.csv"));
  CHECK(fs::exists(dir / "marginal.svg"));
  const std::string manifest = read_file(dir / "run_manifest.json");
  for (const char* name : {"posterior.json", "posterior.csv", "marginal.csv",
                           "marginal.svg"})
    CHECK(manifest.find(name) != std::string::npos);
  CHECK(read_file(dir / "posterior.json").find(kHypothesisSetCaveat) !=
        std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("simulate writes estimated spectra deterministically") {
  const fs::path dir1 = fresh_dir("sim1");
  const fs::path dir2 = fresh_dir("sim2");
  TlsConfiguration config;
  config.epsilon_r = 11.0;
  config.tls.push_back({{30.0, -20.0, 72.0}, {0.0, 1.0, 0.0}, 1.0, 1e-2});
  atomic_write(dir1 / "config.json", configuration_to_json(config));

  const std::string flags = "simulate --tls-config " + (dir1 / "config.json").string() +
                            " --duration 2000 --dt 1 --realizations 5 --seed 11"
                            " --write-records";
  REQUIRE(run(flags + " --out-dir " + dir1.string()) == 0);
  REQUIRE(run(flags + " --out-dir " + dir2.string()) == 0);
  CHECK(read_file(dir1 / "estimated_apsd_site0.csv") ==
        read_file(dir2 / "estimated_apsd_site0.csv"));
  CHECK(read_file(dir1 / "estimated_cpsd_0_1.csv") ==
        read_file(dir2 / "estimated_cpsd_0_1.csv"));
  CHECK(read_file(dir1 / "records.csv") == read_file(dir2 / "records.csv"));
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli [doctest args] <path-to-tlsnoise>\n");
    return 1;
  }
  g_cli = argv[argc - 1];
  doctest::Context context;
  context.applyCommandLine(argc - 1, argv);
  return context.run();
}
