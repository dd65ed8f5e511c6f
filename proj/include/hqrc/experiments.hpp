#pragma once

#include "hqrc/diagnostics.hpp"
#include "hqrc/innate.hpp"
#include "hqrc/reservoir.hpp"
#include "hqrc/tasks.hpp"
#include "hqrc/types.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqrc {

// Experiment orchestration: configuration parsing, the named experiments as
// subcommands, deterministic seeding, CSV/JSON artifact emission.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Qesp, Mc, Spectrum, Narma, Lorenz, Kse, Innate, Trace };

std::string experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

struct QespTask {
  int washout = 9000;
  int eval_steps = 1000;
  int p_trials = 10;
  std::vector<Real> tau_grid;
  std::vector<Real> j_grid;
};

struct McTask {
  int d_max = 200;
  PhaseSplits splits;
  std::vector<Real> tau_grid;
  std::vector<Real> alpha_grid;
  std::vector<int> nqr_grid;
  bool emit_mf = true;
};

struct SpectrumTask {
  std::vector<Real> u_grid;
  std::vector<Real> tau_grid;
};

struct NarmaTask {
  std::vector<int> orders = {10};
  PhaseSplits splits{2000, 2000, 2000};
  std::vector<Real> alpha_grid = {0.0, 0.9};
};

struct LorenzTask {
  int discard = 1000;
  int washout = 1000;
  int train_steps = 10000;
  int predict_steps = 1000;
  Real epsilon = 0.5;
  bool augment = false;
  LorenzParams params;
};

struct KseTask {
  int groups = 8;
  int group_width = 2;
  int halo = 2;
  int discard = 100;
  int washout = 100;
  int train_steps = 2000;
  int predict_steps = 400;
  Real epsilon = 0.5;
  bool augment = true;
  KseParams params;
};

struct InnateTask {
  std::vector<Real> noise_levels = {1e-6, 1e-5, 1e-4, 1e-3};
  int loops = 20;
  Real zeta = 10.0;
  InnateWindows windows;
};

struct TraceTask {
  std::vector<Real> tau_grid;
  int washout = 9000;
  int window = 1000;
  std::string input_type = "random";  // or "constant"
  Real constant_value = 0.5;
  bool exclude_input_qubit = true;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Qesp;
  std::uint64_t seed = 1;
  std::string out_dir = "runs/out";
  int workers = 1;
  int trials = 10;
  HqrParams reservoir;
  Real ridge_beta = 1e-7;

  QespTask qesp;
  McTask mc;
  SpectrumTask spectrum;
  NarmaTask narma;
  LorenzTask lorenz;
  KseTask kse;
  InnateTask innate;
  TraceTask trace;
};

/// Parses and fully validates a JSON config file. Unknown keys are errors.
ExperimentConfig parse_config(const std::string& path);
/// Same, from an in-memory JSON string (used by tests).
ExperimentConfig parse_config_text(const std::string& text);

struct RunManifest {
  std::string experiment;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;
  bool success = false;
  std::string error;
};

/// Executes the experiment, writes its CSV/JSON artifacts and the manifest
/// (atomically) into config.out_dir.
RunManifest run_experiment(const ExperimentConfig& config);

}  // namespace hqrc
