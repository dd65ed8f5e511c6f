#include "hqrc/innate.hpp"

#include "hqrc/learning.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hqrc {

InnateTrainer make_innate_trainer(const HqrSystem& sys, Real learning_rate,
                                  const InnateWindows& windows, Real noise_std) {
  if (learning_rate <= 0.0)
    throw std::invalid_argument("make_innate_trainer: learning rate must be positive");
  if (!(windows.transient < windows.train && windows.train < windows.eval))
    throw std::invalid_argument("make_innate_trainer: windows must be ordered");

  InnateTrainer t;
  t.learning_rate = learning_rate;
  t.windows = windows;
  t.noise_std = noise_std;

  const CouplingMatrices& c = sys.coupling;
  t.node_sets.resize(sys.n_qr());
  for (int n = 0; n < sys.n_qr(); ++n) {
    std::vector<int>& nodes = t.node_sets[n];
    if (c.topology == Topology::Mutual) {
      for (int m = 0; m < sys.n_qr(); ++m) {
        if (m == n) continue;
        for (int i = 0; i < c.block_sizes[m]; ++i) nodes.push_back(c.block_offsets[m] + i);
      }
    } else if (c.topology == Topology::Forward && n > 0) {
      for (int i = 0; i < c.block_sizes[n - 1]; ++i) nodes.push_back(c.block_offsets[n - 1] + i);
    }
    t.p_matrices.push_back(RealMatrix::Identity(Index(nodes.size()), Index(nodes.size())));
  }
  return t;
}

int representative_index(const HqrSystem& sys, int l, int qubit) {
  const QrConfig& cfg = sys.configs[l];
  if (qubit < 1 || qubit > cfg.n_qubits)
    throw std::invalid_argument("representative_index: qubit out of range");
  return sys.coupling.block_offsets[l] + signal_index(cfg.n_virtual, qubit, cfg.n_qubits);
}

void record_targets(HqrSystem& sys, const RealMatrix& inputs, InnateTrainer& trainer) {
  const InnateWindows& w = trainer.windows;
  if (inputs.rows() < w.eval)
    throw std::invalid_argument("record_targets: input sequence shorter than the windows");

  reset(sys);
  trainer.targets = RealMatrix(w.eval - w.transient, sys.n_qr());
  for (int k = 0; k < w.eval; ++k) {
    hqr_step(sys, RealVector(inputs.row(k)));
    if (k >= w.transient)
      for (int n = 0; n < sys.n_qr(); ++n)
        trainer.targets(k - w.transient, n) =
            sys.signal(representative_index(sys, n, trainer.representative_qubit));
  }
  reset(sys);
}

void force_step(InnateTrainer& trainer, RealMatrix& w_con, const RealVector& r,
                const RealVector& errors) {
  for (int n = 0; n < int(trainer.node_sets.size()); ++n) {
    const std::vector<int>& nodes = trainer.node_sets[n];
    if (nodes.empty()) continue;
    const Index m = Index(nodes.size());
    RealVector r_local(m);
    for (Index i = 0; i < m; ++i) r_local(i) = r(nodes[size_t(i)]);

    RealMatrix& p = trainer.p_matrices[n];
    const RealVector pr = p * r_local;
    const Real denom = 1.0 + r_local.dot(pr);
    if (denom < 1.0 - 1e-12)
      throw std::runtime_error("force_step: RLS denominator below 1, P lost definiteness");
    p.noalias() -= (pr * pr.transpose()) / denom;

    const RealVector update = trainer.learning_rate * errors(n) * (p * r_local);
    for (Index i = 0; i < m; ++i) w_con(n, nodes[size_t(i)]) -= update(i);
  }
}

RealVector hqr_step_noisy(HqrSystem& sys, const RealVector& u_k, Real sigma, Rng& rng) {
  hqr_step(sys, u_k);
  if (sigma > 0.0)
    for (Index i = 0; i < sys.signal.size(); ++i) sys.signal(i) += gaussian(rng, 0.0, sigma);
  return sys.signal;
}

namespace {

struct WindowRmse {
  RealVector train_per_reservoir;
  RealVector eval_per_reservoir;
};

// One full pass over [0, eval) from a random initial state with noise on.
// When training is enabled, force_step runs on every step in
// [transient, train).
WindowRmse run_pass(HqrSystem& sys, InnateTrainer& trainer, const RealMatrix& inputs,
                    bool do_train, Real sigma, std::uint64_t pass_seed) {
  const InnateWindows& w = trainer.windows;
  Rng init_rng = make_rng(derive_seed(pass_seed, "init"));
  Rng noise_rng = make_rng(derive_seed(pass_seed, "noise"));
  reset_random(sys, init_rng);

  const int n_qr = sys.n_qr();
  RealMatrix train_traj(w.train - w.transient, n_qr);
  RealMatrix eval_traj(w.eval - w.train, n_qr);

  for (int k = 0; k < w.eval; ++k) {
    hqr_step_noisy(sys, RealVector(inputs.row(k)), sigma, noise_rng);
    if (k < w.transient) continue;

    RealVector rep(n_qr);
    for (int n = 0; n < n_qr; ++n)
      rep(n) = sys.signal(representative_index(sys, n, trainer.representative_qubit));

    if (k < w.train) {
      train_traj.row(k - w.transient) = rep;
      if (do_train) {
        const RealVector errors = rep - trainer.targets.row(k - w.transient).transpose();
        force_step(trainer, sys.coupling.w_con, sys.signal, errors);
        if (sys.coupling.w_con.cwiseAbs().maxCoeff() > 1e3)
          throw std::runtime_error(
              "innate_train: feedback weights diverged past 1e3 at step " + std::to_string(k));
      }
    } else {
      eval_traj.row(k - w.train) = rep;
    }
  }

  WindowRmse result;
  result.train_per_reservoir = RealVector(n_qr);
  result.eval_per_reservoir = RealVector(n_qr);
  const int train_len = w.train - w.transient;
  for (int n = 0; n < n_qr; ++n) {
    result.train_per_reservoir(n) =
        trajectory_rmse(train_traj.col(n), trainer.targets.col(n).head(train_len));
    result.eval_per_reservoir(n) =
        trajectory_rmse(eval_traj.col(n), trainer.targets.col(n).tail(w.eval - w.train));
  }
  return result;
}

}  // namespace

InnateReport innate_train(HqrSystem& sys, InnateTrainer& trainer, const RealMatrix& inputs,
                          int loops, const NoiseSpec& noise) {
  if (trainer.targets.rows() == 0)
    throw std::logic_error("innate_train: record_targets must run first");
  if (inputs.rows() < trainer.windows.eval)
    throw std::invalid_argument("innate_train: input sequence shorter than the windows");

  InnateReport report;
  report.noise_std = noise.std;
  report.loops = loops;

  const WindowRmse pre =
      run_pass(sys, trainer, inputs, /*do_train=*/false, noise.std, derive_seed(noise.seed, "pre"));
  report.pre_rmse_train = pre.train_per_reservoir.mean();
  report.pre_rmse_eval = pre.eval_per_reservoir.mean();
  report.pre_rmse_eval_per_reservoir = pre.eval_per_reservoir;

  for (int loop = 0; loop < loops; ++loop)
    run_pass(sys, trainer, inputs, /*do_train=*/true, noise.std,
             derive_seed(noise.seed, "loop/" + std::to_string(loop)));

  const WindowRmse post = run_pass(sys, trainer, inputs, /*do_train=*/false, noise.std,
                                   derive_seed(noise.seed, "post"));
  report.post_rmse_train = post.train_per_reservoir.mean();
  report.post_rmse_eval = post.eval_per_reservoir.mean();
  report.post_rmse_eval_per_reservoir = post.eval_per_reservoir;
  return report;
}

}  // namespace hqrc
