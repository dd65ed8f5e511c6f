#pragma once

#include "hqrc/rng.hpp"
#include "hqrc/types.hpp"

#include <cstdint>

namespace hqrc {

// Linear readout training (ridge regression), error metrics, and the
// echo-state-network baseline.

/// Prepends the constant-1 bias column to a signal matrix.
RealMatrix assemble_design(const RealMatrix& z);

struct ReadoutModel {
  RealMatrix weights;  // (Ntotal+1) × d_out, row 0 is the bias
  Real ridge_beta = 0.0;

  Index n_signals() const { return weights.rows() - 1; }
  Index d_out() const { return weights.cols(); }
};

/// Solves (XᵀX + βI) W = Xᵀ·targets via LDLT. Throws for a singular system
/// at beta = 0 with a message suggesting a positive β.
ReadoutModel ridge_fit(const RealMatrix& design, const RealMatrix& targets, Real beta);

/// Affine readout of one signal vector (bias handled internally).
RealVector predict(const ReadoutModel& model, const RealVector& z);
/// Row-wise readout of a signal matrix.
RealMatrix predict_all(const ReadoutModel& model, const RealMatrix& z);

/// Σ(y-ŷ)² / Σŷ², with ŷ the target.
Real nmse(const RealVector& y, const RealVector& target);

/// Per-step sqrt((1/M)·Σ_i (y_ti - ŷ_ti)²/σ̂_i²).
RealVector nrmse_series(const RealMatrix& pred, const RealMatrix& target,
                        const RealVector& sigma_hat);

/// sqrt(mean((a-b)²)).
Real trajectory_rmse(const RealVector& a, const RealVector& b);

struct EsnModel {
  int d_h = 0;
  int d_o = 0;
  RealMatrix w_hi;  // d_h × d_o
  RealMatrix w_hh;  // d_h × d_h, rescaled to the target spectral radius
  Real spectral_radius = 0.0;
  Real degree = 0.0;  // average connections per node
  Real noise_level = 0.0;
  RealVector hidden;
};

/// w_hi uniform on [-1,1]; w_hh sparse with the given expected degree, then
/// rescaled so its spectral radius equals `radius`.
EsnModel esn_init(int d_h, int d_o, Real radius, Real degree, Real noise_level,
                  std::uint64_t seed);

/// h = tanh(W_hi·obs + W_hh·h_prev). Training-time noise is added to the
/// observations by the caller (std η_n·σ_d).
RealVector esn_step(const EsnModel& model, const RealVector& h_prev, const RealVector& obs);

}  // namespace hqrc
