#pragma once

#include "hqrc/learning.hpp"
#include "hqrc/reservoir.hpp"
#include "hqrc/tasks.hpp"
#include "hqrc/types.hpp"

#include <cstdint>

namespace hqrc {

// Teacher-forced training and closed-loop autonomous prediction of dynamical
// systems, the VPT metric, state augmentation, the feedback rewiring
// identity, and the parallel local-region architecture.

/// Squares the signals designated for augmentation: design columns 2, 4, …
/// (bias column untouched). Applied identically at train and predict time.
RealMatrix augment_design(const RealMatrix& design);
/// The same map on one raw signal vector (no bias entry).
RealVector augment_signals(const RealVector& z);

struct TeacherForceResult {
  ReadoutModel model;
  RealMatrix signals;  // recorded raw training signals, K × Ntotal
};

/// Drives the reservoir with ground-truth inputs (washout then K recorded
/// steps) and fits the readout on next-step targets. Series rows must be
/// scaled to [0,1] and number at least washout + K + 1.
TeacherForceResult teacher_force(HqrSystem& sys, const RealMatrix& series, int washout, int k,
                                 Real beta, bool augment);

struct ClosedLoopResult {
  RealMatrix predictions;  // steps × d_out, scaled
  int clamp_events = 0;    // readout outputs that needed clamping to [0,1]
  int valid_steps = 0;     // rows actually produced before any non-finite abort
};

/// Feeds the clamped readout output back as the external input. Aborts with
/// the partial series if an output turns non-finite.
ClosedLoopResult closed_loop(HqrSystem& sys, const ReadoutModel& model, int steps, bool augment);

/// W′_con = (1-α)·W′_out + α·W_con with W′_out already replicated/folded to
/// the shape of W_con.
RealMatrix rewire_feedback(const RealMatrix& w_con, const RealMatrix& w_out_replicated,
                           Real alpha);

struct FoldedReadout {
  RealMatrix w_out;  // Nqr × Ntotal: W_in · (linear readout part)
  RealVector bias;   // Nqr: W_in · readout bias, the constant-1 virtual column
};

/// Folds a trained readout through W_in so feedback rewiring can reproduce
/// closed-loop evolution.
FoldedReadout fold_readout(const ReadoutModel& model, const RealMatrix& w_in);

/// Evolves the system with the rewired connection only (external input
/// withdrawn): u′ = clamp(W′_con·z + (1-α_eff)…bias), α_effective = 1.
RealMatrix run_rewired(HqrSystem& sys, const RealMatrix& w_con_prime, const RealVector& bias,
                       bool augment, int steps);

/// Largest horizon with NRMSE ≤ ε, expressed in Lyapunov times: t_f·dt·Λ₁.
Real vpt(const RealMatrix& pred, const RealMatrix& target, const RealVector& sigma_hat,
         Real epsilon, Real lyapunov, Real dt);

struct ParallelLayout {
  int groups = 32;
  int group_width = 2;
  int halo = 2;  // neighbor groups on each side, periodic wrap
  HqrParams group_params;  // per-group ensemble (n_in derived from the halo)
  std::uint64_t seed = 0;
  int washout = 100;
  Real ridge_beta = 1e-7;
  bool augment = true;
  int workers = 1;

  int input_dim() const { return group_width * (2 * halo + 1); }
};

/// Trains one ensemble per local region on haloed inputs and runs the
/// closed-loop forecast, exchanging each group's latest outputs with its halo
/// neighbors every step. Returns the scaled predicted field.
RealMatrix parallel_forecast(const ParallelLayout& layout, const RealMatrix& field_scaled,
                             int train_steps, int predict_steps);

}  // namespace hqrc
