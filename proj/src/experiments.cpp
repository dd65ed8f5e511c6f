#include "hqrc/experiments.hpp"

#include "hqrc/csv.hpp"
#include "hqrc/forecast.hpp"
#include "hqrc/learning.hpp"
#include "hqrc/parallel.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

namespace hqrc {

using Json = nlohmann::json;
namespace fs = std::filesystem;

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Qesp: return "qesp";
    case ExperimentKind::Mc: return "mc";
    case ExperimentKind::Spectrum: return "spectrum";
    case ExperimentKind::Narma: return "narma";
    case ExperimentKind::Lorenz: return "lorenz";
    case ExperimentKind::Kse: return "kse";
    case ExperimentKind::Innate: return "innate";
    case ExperimentKind::Trace: return "trace";
  }
  throw std::logic_error("experiment_name: unreachable");
}

ExperimentKind experiment_from_name(const std::string& name) {
  static const std::map<std::string, ExperimentKind> kinds = {
      {"qesp", ExperimentKind::Qesp},       {"mc", ExperimentKind::Mc},
      {"spectrum", ExperimentKind::Spectrum}, {"narma", ExperimentKind::Narma},
      {"lorenz", ExperimentKind::Lorenz},   {"kse", ExperimentKind::Kse},
      {"innate", ExperimentKind::Innate},   {"trace", ExperimentKind::Trace}};
  const auto it = kinds.find(name);
  if (it == kinds.end())
    throw ConfigError("unknown experiment '" + name +
                      "' (valid: qesp, mc, spectrum, narma, lorenz, kse, innate, trace)");
  return it->second;
}

namespace {

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

void check_keys(const Json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("unknown key '" + path + item.key() + "'");
  }
}

template <typename T>
T get_value(const Json& obj, const std::string& path, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("field '" + path + key + "' has the wrong type");
  }
}

Real get_real_in(const Json& obj, const std::string& path, const char* key, Real fallback,
                 Real lo, Real hi) {
  const Real v = get_value<Real>(obj, path, key, fallback);
  if (!(v >= lo && v <= hi))
    throw ConfigError("field '" + path + key + "' = " + std::to_string(v) +
                      " outside the valid range [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  return v;
}

Real get_positive(const Json& obj, const std::string& path, const char* key, Real fallback) {
  const Real v = get_value<Real>(obj, path, key, fallback);
  if (!(v > 0.0))
    throw ConfigError("field '" + path + key + "' = " + std::to_string(v) +
                      " must be positive");
  return v;
}

int get_int_min(const Json& obj, const std::string& path, const char* key, int fallback,
                int minimum) {
  const int v = get_value<int>(obj, path, key, fallback);
  if (v < minimum)
    throw ConfigError("field '" + path + key + "' = " + std::to_string(v) + " must be >= " +
                      std::to_string(minimum));
  return v;
}

std::vector<Real> get_real_grid(const Json& obj, const std::string& path, const char* key,
                                std::vector<Real> fallback) {
  if (!obj.contains(key)) return fallback;
  std::vector<Real> grid = get_value<std::vector<Real>>(obj, path, key, {});
  if (grid.empty()) throw ConfigError("field '" + path + key + "' must not be empty");
  return grid;
}

Topology parse_topology(const std::string& name, const std::string& path) {
  if (name == "mutual") return Topology::Mutual;
  if (name == "forward") return Topology::Forward;
  if (name == "none") return Topology::None;
  throw ConfigError("field '" + path + "topology' = '" + name +
                    "' (valid: mutual, forward, none)");
}

HqrParams parse_reservoir(const Json& obj, Real& ridge_beta) {
  const std::string path = "reservoir.";
  check_keys(obj, path,
             {"n_qr", "n_qubits", "n_virtual", "tau", "coupling", "alpha", "topology", "beta"});
  HqrParams p;
  p.n_qr = get_int_min(obj, path, "n_qr", 5, 1);
  p.n_qubits = get_int_min(obj, path, "n_qubits", 5, 1);
  if (p.n_qubits > 10)
    throw ConfigError("field 'reservoir.n_qubits' = " + std::to_string(p.n_qubits) +
                      " exceeds the supported maximum of 10");
  p.n_virtual = get_int_min(obj, path, "n_virtual", 1, 1);
  p.tau = get_positive(obj, path, "tau", 4.0);
  p.coupling = get_value<Real>(obj, path, "coupling", 1.0);
  p.alpha = get_real_in(obj, path, "alpha", 0.0, 0.0, 1.0);
  p.topology = parse_topology(get_value<std::string>(obj, path, "topology", "mutual"), path);
  ridge_beta = get_positive(obj, path, "beta", 1e-7);
  return p;
}

PhaseSplits parse_splits(const Json& obj, const std::string& path, const char* key,
                         PhaseSplits fallback) {
  if (!obj.contains(key)) return fallback;
  const auto v = get_value<std::vector<int>>(obj, path, key, {});
  if (v.size() != 3 || v[0] < 1 || v[1] < 1 || v[2] < 1)
    throw ConfigError("field '" + path + key +
                      "' must be three positive step counts [washout, train, eval]");
  return PhaseSplits{v[0], v[1], v[2]};
}

ExperimentConfig parse_config_json(const Json& root) {
  check_keys(root, "", {"experiment", "seed", "out_dir", "workers", "trials", "reservoir",
                        "task"});
  ExperimentConfig c;
  if (!root.contains("experiment")) throw ConfigError("missing required field 'experiment'");
  c.kind = experiment_from_name(get_value<std::string>(root, "", "experiment", ""));
  c.seed = get_value<std::uint64_t>(root, "", "seed", 1);
  c.out_dir = get_value<std::string>(root, "", "out_dir", "runs/" + experiment_name(c.kind));
  c.workers = get_int_min(root, "", "workers", 1, 1);
  c.trials = get_int_min(root, "", "trials", 10, 1);
  if (root.contains("reservoir")) c.reservoir = parse_reservoir(root.at("reservoir"), c.ridge_beta);

  const Json task = root.contains("task") ? root.at("task") : Json::object();
  const std::string path = "task.";
  switch (c.kind) {
    case ExperimentKind::Qesp: {
      check_keys(task, path, {"washout", "eval", "p_trials", "tau_grid", "j_grid"});
      c.qesp.washout = get_int_min(task, path, "washout", 9000, 1);
      c.qesp.eval_steps = get_int_min(task, path, "eval", 1000, 1);
      c.qesp.p_trials = get_int_min(task, path, "p_trials", 10, 1);
      c.qesp.tau_grid = get_real_grid(task, path, "tau_grid", {c.reservoir.tau});
      c.qesp.j_grid = get_real_grid(task, path, "j_grid", {c.reservoir.coupling});
      for (Real t : c.qesp.tau_grid)
        if (t <= 0.0) throw ConfigError("field 'task.tau_grid' entries must be positive");
      break;
    }
    case ExperimentKind::Mc: {
      check_keys(task, path, {"d_max", "splits", "tau_grid", "alpha_grid", "nqr_grid",
                              "emit_mf"});
      c.mc.d_max = get_int_min(task, path, "d_max", 200, 0);
      c.mc.splits = parse_splits(task, path, "splits", PhaseSplits{1000, 3000, 1000});
      c.mc.tau_grid = get_real_grid(task, path, "tau_grid", {c.reservoir.tau});
      c.mc.alpha_grid = get_real_grid(task, path, "alpha_grid", {c.reservoir.alpha});
      c.mc.emit_mf = get_value<bool>(task, path, "emit_mf", true);
      if (task.contains("nqr_grid")) {
        c.mc.nqr_grid = get_value<std::vector<int>>(task, path, "nqr_grid", {});
        for (int n : c.mc.nqr_grid)
          if (n < 1) throw ConfigError("field 'task.nqr_grid' entries must be >= 1");
      } else {
        c.mc.nqr_grid = {c.reservoir.n_qr};
      }
      for (Real a : c.mc.alpha_grid)
        if (a < 0.0 || a > 1.0)
          throw ConfigError("field 'task.alpha_grid' entries must be in [0, 1]");
      break;
    }
    case ExperimentKind::Spectrum: {
      check_keys(task, path, {"u_grid", "tau_grid"});
      c.spectrum.u_grid = get_real_grid(task, path, "u_grid", {0.0, 0.25, 0.5, 0.75, 1.0});
      c.spectrum.tau_grid =
          get_real_grid(task, path, "tau_grid", {std::pow(2.0, -7), 0.125, 1.0, 4.0, 8.0});
      for (Real u : c.spectrum.u_grid)
        if (u < 0.0 || u > 1.0) throw ConfigError("field 'task.u_grid' entries must be in [0, 1]");
      for (Real t : c.spectrum.tau_grid)
        if (t <= 0.0) throw ConfigError("field 'task.tau_grid' entries must be positive");
      break;
    }
    case ExperimentKind::Narma: {
      check_keys(task, path, {"orders", "splits", "alpha_grid"});
      if (task.contains("orders")) {
        c.narma.orders = get_value<std::vector<int>>(task, path, "orders", {});
        for (int n : c.narma.orders)
          if (n < 1) throw ConfigError("field 'task.orders' entries must be >= 1");
      }
      c.narma.splits = parse_splits(task, path, "splits", PhaseSplits{2000, 2000, 2000});
      c.narma.alpha_grid = get_real_grid(task, path, "alpha_grid", {0.0, 0.9});
      for (Real a : c.narma.alpha_grid)
        if (a < 0.0 || a > 1.0)
          throw ConfigError("field 'task.alpha_grid' entries must be in [0, 1]");
      break;
    }
    case ExperimentKind::Lorenz: {
      check_keys(task, path, {"discard", "washout", "train_steps", "predict_steps", "epsilon",
                              "augment", "dt", "lyapunov"});
      c.lorenz.discard = get_int_min(task, path, "discard", 1000, 0);
      c.lorenz.washout = get_int_min(task, path, "washout", 1000, 1);
      c.lorenz.train_steps = get_int_min(task, path, "train_steps", 10000, 1);
      c.lorenz.predict_steps = get_int_min(task, path, "predict_steps", 1000, 1);
      c.lorenz.epsilon = get_positive(task, path, "epsilon", 0.5);
      c.lorenz.augment = get_value<bool>(task, path, "augment", false);
      c.lorenz.params.dt = get_positive(task, path, "dt", 0.01);
      c.lorenz.params.lyapunov = get_positive(task, path, "lyapunov", 0.9056);
      break;
    }
    case ExperimentKind::Kse: {
      check_keys(task, path, {"groups", "group_width", "halo", "discard", "washout",
                              "train_steps", "predict_steps", "epsilon", "augment", "grid_m",
                              "domain_length", "dt", "lyapunov"});
      c.kse.groups = get_int_min(task, path, "groups", 8, 1);
      c.kse.group_width = get_int_min(task, path, "group_width", 2, 1);
      c.kse.halo = get_int_min(task, path, "halo", 2, 0);
      c.kse.discard = get_int_min(task, path, "discard", 100, 0);
      c.kse.washout = get_int_min(task, path, "washout", 100, 1);
      c.kse.train_steps = get_int_min(task, path, "train_steps", 2000, 1);
      c.kse.predict_steps = get_int_min(task, path, "predict_steps", 400, 1);
      c.kse.epsilon = get_positive(task, path, "epsilon", 0.5);
      c.kse.augment = get_value<bool>(task, path, "augment", true);
      c.kse.params.grid = get_int_min(task, path, "grid_m", 16, 4);
      c.kse.params.domain_length = get_positive(task, path, "domain_length", 5.5);
      c.kse.params.dt = get_positive(task, path, "dt", 0.25);
      c.kse.params.lyapunov = get_positive(task, path, "lyapunov", 0.05);
      if (c.kse.params.grid % 2 != 0)
        throw ConfigError("field 'task.grid_m' must be even for the spectral grid");
      if (c.kse.groups * c.kse.group_width != c.kse.params.grid)
        throw ConfigError("task.groups × task.group_width must equal task.grid_m");
      break;
    }
    case ExperimentKind::Innate: {
      check_keys(task, path, {"noise_levels", "loops", "zeta", "windows"});
      if (task.contains("noise_levels")) {
        c.innate.noise_levels = get_value<std::vector<Real>>(task, path, "noise_levels", {});
        for (Real s : c.innate.noise_levels)
          if (s < 0.0) throw ConfigError("field 'task.noise_levels' entries must be >= 0");
      }
      c.innate.loops = get_int_min(task, path, "loops", 20, 1);
      c.innate.zeta = get_positive(task, path, "zeta", 10.0);
      if (task.contains("windows")) {
        const auto v = get_value<std::vector<int>>(task, path, "windows", {});
        if (v.size() != 3 || !(0 < v[0] && v[0] < v[1] && v[1] < v[2]))
          throw ConfigError(
              "field 'task.windows' must be increasing step counts [transient, train, eval]");
        c.innate.windows = InnateWindows{v[0], v[1], v[2]};
      }
      break;
    }
    case ExperimentKind::Trace: {
      check_keys(task, path, {"tau_grid", "washout", "window", "input_type", "constant_value",
                              "exclude_input_qubit"});
      c.trace.tau_grid = get_real_grid(task, path, "tau_grid", {c.reservoir.tau});
      for (Real t : c.trace.tau_grid)
        if (t <= 0.0) throw ConfigError("field 'task.tau_grid' entries must be positive");
      c.trace.washout = get_int_min(task, path, "washout", 9000, 1);
      c.trace.window = get_int_min(task, path, "window", 1000, 1);
      c.trace.input_type = get_value<std::string>(task, path, "input_type", "random");
      if (c.trace.input_type != "random" && c.trace.input_type != "constant")
        throw ConfigError("field 'task.input_type' must be 'random' or 'constant'");
      c.trace.constant_value = get_real_in(task, path, "constant_value", 0.5, 0.0, 1.0);
      c.trace.exclude_input_qubit = get_value<bool>(task, path, "exclude_input_qubit", true);
      break;
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Shared runner helpers
// ---------------------------------------------------------------------------

RealMatrix uniform_inputs(int steps, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  RealMatrix inputs(steps, 1);
  for (int k = 0; k < steps; ++k) inputs(k, 0) = uniform(rng, 0.0, 1.0);
  return inputs;
}

// Single-reservoir ensembles cannot carry feedback.
Real effective_alpha(int n_qr, Real alpha) { return n_qr == 1 ? 0.0 : alpha; }

std::string out_path(const ExperimentConfig& c, const std::string& name) {
  return (fs::path(c.out_dir) / name).string();
}

// ---------------------------------------------------------------------------
// Experiment runners
// ---------------------------------------------------------------------------

void run_qesp(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const QespTask& t = c.qesp;
  struct Job {
    size_t ji, ti;
    int trial;
    Real mu;
  };
  std::vector<Job> jobs;
  for (size_t ji = 0; ji < t.j_grid.size(); ++ji)
    for (size_t ti = 0; ti < t.tau_grid.size(); ++ti)
      for (int trial = 0; trial < c.trials; ++trial) jobs.push_back({ji, ti, trial, 0.0});

  parallel_for(jobs.size(), c.workers, [&](size_t i) {
    Job& job = jobs[i];
    HqrBuilder builder;
    builder.params = c.reservoir;
    builder.params.coupling = t.j_grid[job.ji];
    builder.params.tau = t.tau_grid[job.ti];
    builder.seed = derive_seed(c.seed, "qesp/reservoir/" + std::to_string(job.trial));
    const RealMatrix inputs = uniform_inputs(
        t.washout + t.eval_steps, derive_seed(c.seed, "qesp/inputs/" + std::to_string(job.trial)));
    const QespConfig cfg{t.washout, t.eval_steps, t.p_trials};
    job.mu = qesp_index(builder, inputs, cfg,
                        derive_seed(c.seed, "qesp/perturb/" + std::to_string(job.ji) + "/" +
                                                std::to_string(job.ti) + "/" +
                                                std::to_string(job.trial)));
  });

  CsvWriter csv(out_path(c, "qesp.csv"), {"j", "tau", "trial", "mu"});
  for (const Job& job : jobs)
    csv.row(std::vector<double>{t.j_grid[job.ji], t.tau_grid[job.ti], double(job.trial), job.mu});
  outputs.push_back("qesp.csv");
}

void run_mc(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const McTask& t = c.mc;
  struct Job {
    int nqr;
    Real alpha, tau;
    int trial;
    MemoryCurve curve;
  };
  std::vector<Job> jobs;
  for (int nqr : t.nqr_grid)
    for (Real alpha : t.alpha_grid)
      for (Real tau : t.tau_grid)
        for (int trial = 0; trial < c.trials; ++trial)
          jobs.push_back({nqr, effective_alpha(nqr, alpha), tau, trial, {}});

  parallel_for(jobs.size(), c.workers, [&](size_t i) {
    Job& job = jobs[i];
    HqrBuilder builder;
    builder.params = c.reservoir;
    builder.params.n_qr = job.nqr;
    builder.params.alpha = job.alpha;
    builder.params.tau = job.tau;
    builder.seed = derive_seed(c.seed, "mc/trial/" + std::to_string(job.trial));
    job.curve = memory_curve(builder, t.d_max, t.splits, builder.seed, c.ridge_beta);
  });

  CsvWriter mc_csv(out_path(c, "mc.csv"), {"nqr", "alpha", "tau", "trial", "mc"});
  for (const Job& job : jobs)
    mc_csv.row(std::vector<double>{double(job.nqr), job.alpha, job.tau, double(job.trial),
                                   job.curve.mc});
  outputs.push_back("mc.csv");

  if (t.emit_mf) {
    CsvWriter mf_csv(out_path(c, "mf.csv"), {"nqr", "alpha", "tau", "trial", "d", "mf"});
    for (const Job& job : jobs)
      for (int d = 0; d <= t.d_max; ++d)
        mf_csv.row(std::vector<double>{double(job.nqr), job.alpha, job.tau, double(job.trial),
                                       double(d), job.curve.mf(d)});
    outputs.push_back("mf.csv");
  }
}

void run_spectrum(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const SpectrumTask& t = c.spectrum;
  struct Job {
    int trial;
    size_t ui, ti;
    Real lambda1 = 0.0, lambda2 = 0.0, inv_lambda2 = 0.0, residual = 0.0;
  };
  std::vector<Job> jobs;
  for (int trial = 0; trial < c.trials; ++trial)
    for (size_t ui = 0; ui < t.u_grid.size(); ++ui)
      for (size_t ti = 0; ti < t.tau_grid.size(); ++ti) jobs.push_back({trial, ui, ti});

  parallel_for(jobs.size(), c.workers, [&](size_t i) {
    Job& job = jobs[i];
    const IsingHamiltonian h =
        build_ising(c.reservoir.n_qubits, c.reservoir.coupling,
                    derive_seed(c.seed, "spectrum/h/" + std::to_string(job.trial)));
    const SuperOperator op = superoperator(h, t.u_grid[job.ui], t.tau_grid[job.ti]);
    const SpectrumResult spec = cptp_spectrum(op);
    job.lambda1 = std::abs(spec.eigenvalues(0));
    job.lambda2 = spec.eigenvalues.size() > 1 ? std::abs(spec.eigenvalues(1)) : 0.0;
    job.inv_lambda2 = spec.inv_lambda2;
    const ComplexVector fp = vectorize(spec.fixed_point.data);
    job.residual = (op.matrix * fp - fp).cwiseAbs().maxCoeff();
  });

  CsvWriter csv(out_path(c, "spectrum.csv"),
                {"trial", "u", "tau", "lambda1_abs", "lambda2_abs", "inv_lambda2",
                 "fixed_point_residual"});
  for (const Job& job : jobs)
    csv.row(std::vector<double>{double(job.trial), t.u_grid[job.ui], t.tau_grid[job.ti],
                                job.lambda1, job.lambda2, job.inv_lambda2, job.residual});
  outputs.push_back("spectrum.csv");
}

void run_narma(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const NarmaTask& t = c.narma;
  struct Job {
    int order;
    Real alpha;
    int trial;
    Real nmse_value = 0.0;
    RealVector eval_targets, eval_predictions;  // kept for trial 0 only
  };
  std::vector<Job> jobs;
  for (int order : t.orders)
    for (Real alpha : t.alpha_grid)
      for (int trial = 0; trial < c.trials; ++trial)
        jobs.push_back({order, effective_alpha(c.reservoir.n_qr, alpha), trial});

  parallel_for(jobs.size(), c.workers, [&](size_t i) {
    Job& job = jobs[i];
    const int total = t.splits.total();
    const RealMatrix raw =
        uniform_inputs(total, derive_seed(c.seed, "narma/inputs/" + std::to_string(job.trial)));
    NarmaParams params;
    params.order = job.order;
    const NarmaSeries series = narma_series(params, raw.col(0));

    HqrBuilder builder;
    builder.params = c.reservoir;
    builder.params.alpha = job.alpha;
    builder.seed = derive_seed(c.seed, "narma/reservoir/" + std::to_string(job.trial));
    HqrSystem sys = builder.build();

    RealMatrix inputs(total, 1);
    inputs.col(0) = series.inputs;
    const RealMatrix z = run_sequence(sys, inputs, t.splits.washout);
    const RealMatrix design = assemble_design(z);
    const ReadoutModel model = ridge_fit(design.topRows(t.splits.train),
                                         series.targets.segment(t.splits.washout, t.splits.train),
                                         c.ridge_beta);
    const RealVector predictions =
        design.bottomRows(t.splits.eval) * model.weights;
    const RealVector targets = series.targets.tail(t.splits.eval);
    job.nmse_value = nmse(predictions, targets);
    if (job.trial == 0) {
      job.eval_targets = targets;
      job.eval_predictions = predictions;
    }
  });

  CsvWriter csv(out_path(c, "narma_nmse.csv"), {"order", "alpha", "trial", "nmse"});
  for (const Job& job : jobs)
    csv.row(std::vector<double>{double(job.order), job.alpha, double(job.trial), job.nmse_value});
  outputs.push_back("narma_nmse.csv");

  CsvWriter series_csv(out_path(c, "narma_outputs.csv"),
                       {"order", "alpha", "k", "target", "prediction"});
  for (const Job& job : jobs) {
    if (job.trial != 0) continue;
    for (Index k = 0; k < job.eval_targets.size(); ++k)
      series_csv.row(std::vector<double>{double(job.order), job.alpha,
                                         double(t.splits.washout + t.splits.train + k + 1),
                                         job.eval_targets(k), job.eval_predictions(k)});
  }
  outputs.push_back("narma_outputs.csv");
}

void run_lorenz(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const LorenzTask& t = c.lorenz;
  const int kept = t.washout + t.train_steps + t.predict_steps + 1;
  RealVector x0(3);
  x0 << 1.0, 1.0, 1.0;
  const RealMatrix full = lorenz_rk4(x0, t.discard + kept, t.params);
  const RealMatrix data = full.bottomRows(kept);

  const RealMatrix train_block = data.topRows(t.washout + t.train_steps + 1);
  const auto [train_scaled, transform] = minmax_scale(train_block, 0.0, 1.0);
  const RealMatrix scaled = transform.apply(data);

  const RealMatrix train_targets = scaled.middleRows(t.washout + 1, t.train_steps);
  RealVector sigma_hat(3);
  for (Index j = 0; j < 3; ++j) {
    const RealVector col = train_targets.col(j);
    sigma_hat(j) = std::sqrt((col.array() - col.mean()).square().sum() / Real(col.size()));
  }
  const RealMatrix target_window = scaled.middleRows(t.washout + t.train_steps, t.predict_steps);

  struct Job {
    int trial;
    Real vpt_value = 0.0;
    RealMatrix predictions;
    int clamp_events = 0;
  };
  std::vector<Job> jobs;
  for (int trial = 0; trial < c.trials; ++trial) jobs.push_back({trial});

  parallel_for(jobs.size(), c.workers, [&](size_t i) {
    Job& job = jobs[i];
    HqrBuilder builder;
    builder.params = c.reservoir;
    builder.params.n_in = 3;
    builder.seed = derive_seed(c.seed, "lorenz/reservoir/" + std::to_string(job.trial));
    HqrSystem sys = builder.build();
    const TeacherForceResult trained =
        teacher_force(sys, scaled, t.washout, t.train_steps, c.ridge_beta, t.augment);
    const ClosedLoopResult loop = closed_loop(sys, trained.model, t.predict_steps, t.augment);
    job.clamp_events = loop.clamp_events;
    job.vpt_value = vpt(loop.predictions, target_window, sigma_hat, t.epsilon,
                        t.params.lyapunov, t.params.dt);
    if (job.trial == 0) job.predictions = loop.predictions;
  });

  CsvWriter csv(out_path(c, "lorenz_vpt.csv"), {"trial", "vpt", "clamp_events"});
  for (const Job& job : jobs)
    csv.row(std::vector<double>{double(job.trial), job.vpt_value, double(job.clamp_events)});
  outputs.push_back("lorenz_vpt.csv");

  CsvWriter pred_csv(out_path(c, "lorenz_pred.csv"),
                     {"step", "time_lyapunov", "pred_x", "pred_y", "pred_z", "true_x", "true_y",
                      "true_z"});
  const RealMatrix pred_unscaled = transform.invert(jobs[0].predictions);
  const RealMatrix target_unscaled = transform.invert(target_window);
  for (Index k = 0; k < pred_unscaled.rows(); ++k)
    pred_csv.row(std::vector<double>{double(k + 1),
                                     double(k + 1) * t.params.dt * t.params.lyapunov,
                                     pred_unscaled(k, 0), pred_unscaled(k, 1),
                                     pred_unscaled(k, 2), target_unscaled(k, 0),
                                     target_unscaled(k, 1), target_unscaled(k, 2)});
  outputs.push_back("lorenz_pred.csv");
}

void run_kse(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const KseTask& t = c.kse;
  const int kept = t.washout + t.train_steps + t.predict_steps + 1;
  const RealVector u0 = kse_random_field(t.params, derive_seed(c.seed, "kse/ic"));
  const RealMatrix full = kse_etdrk4(u0, t.discard + kept, t.params);
  const RealMatrix data = full.bottomRows(kept);

  const RealMatrix train_block = data.topRows(t.washout + t.train_steps + 1);
  const auto [train_scaled, transform] = minmax_scale(train_block, 0.0, 1.0);
  const RealMatrix scaled = transform.apply(data);

  const RealMatrix train_targets = scaled.middleRows(t.washout + 1, t.train_steps);
  RealVector sigma_hat(scaled.cols());
  for (Index j = 0; j < scaled.cols(); ++j) {
    const RealVector col = train_targets.col(j);
    sigma_hat(j) = std::sqrt((col.array() - col.mean()).square().sum() / Real(col.size()));
  }

  ParallelLayout layout;
  layout.groups = t.groups;
  layout.group_width = t.group_width;
  layout.halo = t.halo;
  layout.group_params = c.reservoir;
  layout.seed = derive_seed(c.seed, "kse/groups");
  layout.washout = t.washout;
  layout.ridge_beta = c.ridge_beta;
  layout.augment = t.augment;
  layout.workers = c.workers;

  const RealMatrix predicted = parallel_forecast(layout, scaled, t.train_steps, t.predict_steps);
  const RealMatrix target_window = scaled.middleRows(t.washout + t.train_steps, t.predict_steps);
  const RealVector errors = nrmse_series(predicted, target_window, sigma_hat);

  CsvWriter nrmse_csv(out_path(c, "kse_nrmse.csv"), {"step", "time_lyapunov", "nrmse"});
  for (Index k = 0; k < errors.size(); ++k)
    nrmse_csv.row(std::vector<double>{double(k + 1),
                                      double(k + 1) * t.params.dt * t.params.lyapunov,
                                      errors(k)});
  outputs.push_back("kse_nrmse.csv");

  std::vector<std::string> header = {"step"};
  for (int i = 0; i < t.params.grid; ++i) header.push_back("x" + std::to_string(i));
  const RealMatrix pred_unscaled = transform.invert(predicted);
  const RealMatrix target_unscaled = transform.invert(target_window);
  CsvWriter pred_csv(out_path(c, "kse_pred.csv"), header);
  CsvWriter target_csv(out_path(c, "kse_target.csv"), header);
  for (Index k = 0; k < pred_unscaled.rows(); ++k) {
    std::vector<double> row_p{double(k + 1)}, row_t{double(k + 1)};
    for (Index j = 0; j < pred_unscaled.cols(); ++j) {
      row_p.push_back(pred_unscaled(k, j));
      row_t.push_back(target_unscaled(k, j));
    }
    pred_csv.row(row_p);
    target_csv.row(row_t);
  }
  outputs.push_back("kse_pred.csv");
  outputs.push_back("kse_target.csv");
}

void run_innate(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const InnateTask& t = c.innate;
  struct Job {
    size_t ni;
    int trial;
    InnateReport report;
  };
  std::vector<Job> jobs;
  for (size_t ni = 0; ni < t.noise_levels.size(); ++ni)
    for (int trial = 0; trial < c.trials; ++trial) jobs.push_back({ni, trial, {}});

  parallel_for(jobs.size(), c.workers, [&](size_t i) {
    Job& job = jobs[i];
    HqrBuilder builder;
    builder.params = c.reservoir;
    builder.seed = derive_seed(c.seed, "innate/reservoir/" + std::to_string(job.trial));
    HqrSystem sys = builder.build();
    const RealMatrix inputs = uniform_inputs(
        t.windows.eval, derive_seed(c.seed, "innate/inputs/" + std::to_string(job.trial)));
    InnateTrainer trainer = make_innate_trainer(sys, t.zeta, t.windows, t.noise_levels[job.ni]);
    record_targets(sys, inputs, trainer);
    NoiseSpec noise;
    noise.std = t.noise_levels[job.ni];
    noise.seed = derive_seed(c.seed, "innate/noise/" + std::to_string(job.ni) + "/" +
                                         std::to_string(job.trial));
    job.report = innate_train(sys, trainer, inputs, t.loops, noise);
  });

  CsvWriter csv(out_path(c, "innate_rmse.csv"),
                {"sigma", "trial", "loops", "pre_rmse_train", "pre_rmse_eval", "post_rmse_train",
                 "post_rmse_eval"});
  Json records = Json::array();
  for (const Job& job : jobs) {
    const InnateReport& r = job.report;
    csv.row(std::vector<double>{t.noise_levels[job.ni], double(job.trial), double(r.loops),
                                r.pre_rmse_train, r.pre_rmse_eval, r.post_rmse_train,
                                r.post_rmse_eval});
    Json rec;
    rec["noise_std"] = r.noise_std;
    rec["trial"] = job.trial;
    rec["loops"] = r.loops;
    rec["pre_rmse"] = {{"train_window", r.pre_rmse_train}, {"eval_window", r.pre_rmse_eval}};
    rec["post_rmse"] = {{"train_window", r.post_rmse_train}, {"eval_window", r.post_rmse_eval}};
    rec["pre_rmse_eval_per_reservoir"] =
        std::vector<Real>(r.pre_rmse_eval_per_reservoir.begin(),
                          r.pre_rmse_eval_per_reservoir.end());
    rec["post_rmse_eval_per_reservoir"] =
        std::vector<Real>(r.post_rmse_eval_per_reservoir.begin(),
                          r.post_rmse_eval_per_reservoir.end());
    records.push_back(rec);
  }
  std::ofstream json_out(out_path(c, "innate_report.json"));
  json_out << records.dump(2) << "\n";
  outputs.push_back("innate_rmse.csv");
  outputs.push_back("innate_report.json");
}

void run_trace(const ExperimentConfig& c, std::vector<std::string>& outputs) {
  const TraceTask& t = c.trace;
  struct Job {
    size_t ti;
    RealMatrix window;  // recorded signals
  };
  std::vector<Job> jobs;
  for (size_t ti = 0; ti < t.tau_grid.size(); ++ti) jobs.push_back({ti, {}});

  const RealMatrix inputs =
      t.input_type == "random"
          ? uniform_inputs(t.washout + t.window, derive_seed(c.seed, "trace/inputs"))
          : RealMatrix::Constant(t.washout + t.window, 1, t.constant_value);

  parallel_for(jobs.size(), c.workers, [&](size_t i) {
    Job& job = jobs[i];
    HqrBuilder builder;
    builder.params = c.reservoir;
    builder.params.tau = t.tau_grid[job.ti];
    builder.seed = derive_seed(c.seed, "trace/reservoir");
    HqrSystem sys = builder.build();
    job.window = run_sequence(sys, inputs, t.washout);
  });

  CsvWriter csv(out_path(c, "trace.csv"), {"tau", "step", "virtual", "qubit", "signal"});
  const int n = c.reservoir.n_qubits;
  for (const Job& job : jobs)
    for (Index k = 0; k < job.window.rows(); ++k)
      for (int v = 1; v <= c.reservoir.n_virtual; ++v)
        for (int j = t.exclude_input_qubit ? 2 : 1; j <= n; ++j)
          csv.row(std::vector<double>{t.tau_grid[job.ti], double(t.washout + k + 1), double(v),
                                      double(j),
                                      job.window(k, signal_index(v, j, n))});
  outputs.push_back("trace.csv");
}

void write_manifest(const ExperimentConfig& c, const RunManifest& manifest) {
  Json j;
  j["experiment"] = manifest.experiment;
  j["seed"] = manifest.seed;
  j["out_dir"] = manifest.out_dir;
  j["code_version"] = "0.1.0";
  j["outputs"] = manifest.outputs;
  j["duration_seconds"] = manifest.duration_seconds;
  j["success"] = manifest.success;
  if (!manifest.error.empty()) j["error"] = manifest.error;

  const fs::path path = fs::path(c.out_dir) / "manifest.json";
  const fs::path tmp = fs::path(c.out_dir) / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  Json root;
  try {
    root = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config_json(root);
}

ExperimentConfig parse_config_text(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config_json(root);
}

RunManifest run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(config.out_dir);

  RunManifest manifest;
  manifest.experiment = experiment_name(config.kind);
  manifest.out_dir = config.out_dir;
  manifest.seed = config.seed;

  try {
    switch (config.kind) {
      case ExperimentKind::Qesp: run_qesp(config, manifest.outputs); break;
      case ExperimentKind::Mc: run_mc(config, manifest.outputs); break;
      case ExperimentKind::Spectrum: run_spectrum(config, manifest.outputs); break;
      case ExperimentKind::Narma: run_narma(config, manifest.outputs); break;
      case ExperimentKind::Lorenz: run_lorenz(config, manifest.outputs); break;
      case ExperimentKind::Kse: run_kse(config, manifest.outputs); break;
      case ExperimentKind::Innate: run_innate(config, manifest.outputs); break;
      case ExperimentKind::Trace: run_trace(config, manifest.outputs); break;
    }
    manifest.success = true;
  } catch (const std::exception& e) {
    manifest.success = false;
    manifest.error = e.what();
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(config, manifest);
    throw;
  }

  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(config, manifest);
  return manifest;
}

}  // namespace hqrc
