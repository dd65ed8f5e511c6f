#pragma once

#include "hqrc/reservoir.hpp"
#include "hqrc/types.hpp"

#include <cstdint>
#include <vector>

namespace hqrc {

// Quantum-innate training: recursive-least-squares adaptation of the
// classical feedback weights toward recorded noise-free trajectories.

struct InnateWindows {
  int transient = 2000;  // steps, boundaries of [transient, train) and [train, eval)
  int train = 4000;
  int eval = 6000;
};

struct NoiseSpec {
  Real std = 0.0;  // σ
  std::uint64_t seed = 0;
};

struct InnateTrainer {
  Real learning_rate = 10.0;  // ζ
  InnateWindows windows;
  Real noise_std = 0.0;
  int representative_qubit = 2;  // qubit 1 is the injection site

  std::vector<std::vector<int>> node_sets;  // A(n): nodes connected to QR n
  std::vector<RealMatrix> p_matrices;       // P^(n) over A(n), identity-initialized
  RealMatrix targets;                       // (eval - transient) × Nqr
};

/// Builds the trainer for a system: node sets from the coupling topology,
/// P^(n) = I. Targets are empty until record_targets runs.
InnateTrainer make_innate_trainer(const HqrSystem& sys, Real learning_rate,
                                  const InnateWindows& windows, Real noise_std);

/// Flat index of the representative signal of reservoir l (0-based): the
/// chosen qubit at the last virtual substep.
int representative_index(const HqrSystem& sys, int l, int qubit);

/// Noise-free run over [0, eval); stores the representative signal of every
/// reservoir over [transient, eval) and resets the system.
void record_targets(HqrSystem& sys, const RealMatrix& inputs, InnateTrainer& trainer);

/// One RLS update: P^(n) first (rank-one, restricted to A(n)), then the
/// weight rows. Self-loop columns stay exactly zero.
void force_step(InnateTrainer& trainer, RealMatrix& w_con, const RealVector& r,
                const RealVector& errors);

/// One Alg.-1 step with Gaussian noise of std sigma added to every stored
/// signal component.
RealVector hqr_step_noisy(HqrSystem& sys, const RealVector& u_k, Real sigma, Rng& rng);

struct InnateReport {
  Real noise_std = 0.0;
  int loops = 0;
  Real pre_rmse_train = 0.0;   // mean over reservoirs, training window
  Real pre_rmse_eval = 0.0;    // evaluation window
  Real post_rmse_train = 0.0;
  Real post_rmse_eval = 0.0;
  RealVector pre_rmse_eval_per_reservoir;
  RealVector post_rmse_eval_per_reservoir;
};

/// Runs the pre-train evaluation, `loops` training passes (random initial
/// states, noise on, force_step inside [transient, train)), then the
/// post-train evaluation with weights frozen. Mutates the system's W_con.
InnateReport innate_train(HqrSystem& sys, InnateTrainer& trainer, const RealMatrix& inputs,
                          int loops, const NoiseSpec& noise);

}  // namespace hqrc
