#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hqrc/experiments.hpp"
#include "hqrc/rng.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace hqrc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hqrc_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));

  // Collision scan over 1e4 distinct labels
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) seen.insert(derive_seed(99, "label/" + std::to_string(i)));
  CHECK(seen.size() == 10000);
}

TEST_CASE("parse_config happy path and defaults") {
  const ExperimentConfig c = parse_config_text(R"({
    "experiment": "narma",
    "seed": 5,
    "reservoir": {"n_qr": 5, "n_qubits": 5, "n_virtual": 20, "tau": 1.0,
                   "coupling": 1.0, "alpha": 0.9, "topology": "mutual", "beta": 1e-7},
    "task": {"orders": [10], "splits": [2000, 2000, 2000], "alpha_grid": [0.0, 0.9]}
  })");
  CHECK(c.kind == ExperimentKind::Narma);
  CHECK(c.seed == 5);
  CHECK(c.reservoir.n_virtual == 20);
  CHECK(c.narma.orders == std::vector<int>{10});
  CHECK(c.narma.splits.train == 2000);
  CHECK(c.ridge_beta == 1e-7);
}

TEST_CASE("parse_config rejects invalid values") {
  // Negative tau
  CHECK_THROWS_WITH_AS(parse_config_text(R"({
    "experiment": "qesp",
    "reservoir": {"tau": -1.0}
  })"),
                       doctest::Contains("tau"), ConfigError);

  // Unknown key naming the typo
  CHECK_THROWS_WITH_AS(parse_config_text(R"({
    "experiment": "qesp",
    "reservoir": {"taus": 1.0}
  })"),
                       doctest::Contains("taus"), ConfigError);

  // Unknown experiment
  CHECK_THROWS_AS(parse_config_text(R"({"experiment": "quux"})"), ConfigError);
  // Missing experiment
  CHECK_THROWS_AS(parse_config_text(R"({"seed": 1})"), ConfigError);
  // Alpha out of range
  CHECK_THROWS_AS(parse_config_text(R"({
    "experiment": "qesp",
    "reservoir": {"alpha": 1.5}
  })"),
                  ConfigError);
}

TEST_CASE("qesp experiment writes deterministic CSV") {
  ExperimentConfig c = parse_config_text(R"({
    "experiment": "qesp",
    "seed": 11,
    "trials": 2,
    "reservoir": {"n_qr": 2, "n_qubits": 2, "n_virtual": 1, "tau": 4.0, "alpha": 0.5},
    "task": {"washout": 30, "eval": 10, "p_trials": 2, "tau_grid": [0.0078125, 4.0]}
  })");

  const fs::path dir_a = fresh_dir("qesp_a");
  const fs::path dir_b = fresh_dir("qesp_b");
  c.out_dir = dir_a.string();
  const RunManifest m1 = run_experiment(c);
  CHECK(m1.success);
  c.out_dir = dir_b.string();
  run_experiment(c);

  const std::string csv_a = slurp(dir_a / "qesp.csv");
  const std::string csv_b = slurp(dir_b / "qesp.csv");
  CHECK(csv_a == csv_b);
  CHECK(csv_a.substr(0, csv_a.find('\n')) == "j,tau,trial,mu");
  CHECK(fs::exists(dir_a / "manifest.json"));

  // Workers must not affect the bytes
  const fs::path dir_c = fresh_dir("qesp_c");
  c.out_dir = dir_c.string();
  c.workers = 2;
  run_experiment(c);
  CHECK(slurp(dir_c / "qesp.csv") == csv_a);
}

TEST_CASE("mc experiment emits mf and mc tables") {
  ExperimentConfig c = parse_config_text(R"({
    "experiment": "mc",
    "seed": 13,
    "trials": 1,
    "reservoir": {"n_qr": 2, "n_qubits": 2, "n_virtual": 1, "tau": 4.0, "alpha": 0.5},
    "task": {"d_max": 3, "splits": [50, 150, 50], "tau_grid": [4.0], "nqr_grid": [1, 2]}
  })");
  const fs::path dir = fresh_dir("mc");
  c.out_dir = dir.string();
  const RunManifest m = run_experiment(c);
  CHECK(m.success);
  const std::string mc_csv = slurp(dir / "mc.csv");
  CHECK(mc_csv.find("nqr,alpha,tau,trial,mc") == 0);
  // Single-reservoir rows are forced to alpha = 0
  CHECK(mc_csv.find("1,0,4,0,") != std::string::npos);
  CHECK(fs::exists(dir / "mf.csv"));
}

TEST_CASE("trace experiment excludes the input qubit by default") {
  ExperimentConfig c = parse_config_text(R"({
    "experiment": "trace",
    "seed": 17,
    "reservoir": {"n_qr": 2, "n_qubits": 2, "n_virtual": 1, "tau": 2.0, "alpha": 0.5},
    "task": {"tau_grid": [2.0], "washout": 20, "window": 5}
  })");
  const fs::path dir = fresh_dir("trace");
  c.out_dir = dir.string();
  run_experiment(c);
  const std::string csv = slurp(dir / "trace.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "tau,step,virtual,qubit,signal");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    // qubit column (4th) is never the input qubit
    std::istringstream cells(line);
    std::string cell;
    for (int i = 0; i < 4; ++i) std::getline(cells, cell, ',');
    CHECK(cell == "2");
  }
  CHECK(rows == 5);  // excluding the input qubit leaves qubit 2 only, 5 steps
}

TEST_CASE("innate experiment writes JSON records") {
  ExperimentConfig c = parse_config_text(R"({
    "experiment": "innate",
    "seed": 19,
    "trials": 1,
    "reservoir": {"n_qr": 2, "n_qubits": 2, "n_virtual": 1, "tau": 4.0, "alpha": 0.5},
    "task": {"noise_levels": [0.0001], "loops": 2, "zeta": 10.0, "windows": [20, 50, 70]}
  })");
  const fs::path dir = fresh_dir("innate");
  c.out_dir = dir.string();
  const RunManifest m = run_experiment(c);
  CHECK(m.success);
  const std::string json = slurp(dir / "innate_report.json");
  CHECK(json.find("noise_std") != std::string::npos);
  CHECK(json.find("post_rmse") != std::string::npos);
  CHECK(fs::exists(dir / "innate_rmse.csv"));
}

TEST_CASE("failure writes a manifest with the error recorded") {
  ExperimentConfig c = parse_config_text(R"({
    "experiment": "qesp",
    "reservoir": {"n_qr": 1, "n_qubits": 2, "alpha": 0.5},
    "task": {"washout": 10, "eval": 5, "p_trials": 1}
  })");
  const fs::path dir = fresh_dir("fail");
  c.out_dir = dir.string();
  CHECK_THROWS(run_experiment(c));
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("\"success\": false") != std::string::npos);
  CHECK(manifest.find("error") != std::string::npos);
}
