#pragma once

#include "hqrc/rng.hpp"
#include "hqrc/types.hpp"

#include <cstdint>
#include <utility>

namespace hqrc {

// Benchmark data generation: NARMA sequences, delay targets, Lorenz and
// Kuramoto-Sivashinsky integration, scaling utilities.

struct NarmaParams {
  int order = 10;
  Real kappa = 0.3;
  Real eta = 0.05;
  Real gamma = 1.5;
  Real delta = 0.1;
  Real input_lo = 0.0;  // raw [0,1] inputs are linearly scaled into
  Real input_hi = 0.2;  // [input_lo, input_hi]
};

struct NarmaSeries {
  RealVector inputs;  // scaled
  RealVector targets;
};

/// y_k = κ·y_{k-1} + η·y_{k-1}·Σ_{j=1..n} y_{k-j} + γ·u_{k-n+1}·u_k + δ with
/// zero pre-history. Throws if |y_k| ever exceeds 10.
NarmaSeries narma_series(const NarmaParams& params, const RealVector& inputs_raw);

/// Shifted copy ŷ_k = u_{k-d}; the first d entries are invalid and must be
/// excluded from fitting windows.
RealVector delay_target(const RealVector& inputs, int d);

struct LorenzParams {
  Real a = 10.0;
  Real b = 28.0;
  Real c = 8.0 / 3.0;
  Real dt = 0.01;
  Real lyapunov = 0.9056;  // Λ₁
};

/// Classic RK4 on the Lorenz equations; rows are steps (including x0).
RealMatrix lorenz_rk4(const RealVector& x0, int steps, const LorenzParams& params);

struct KseParams {
  Real domain_length = 22.0;  // L
  int grid = 64;              // M, even
  Real dt = 0.25;
  Real lyapunov = 0.05;  // Λ₁
  int contour_points = 32;
};

/// ETDRK4 time stepping of u_t + u·u_x + u_xx + u_xxxx = 0 on a periodic
/// Fourier grid; rows are time steps (including u0).
RealMatrix kse_etdrk4(const RealVector& u0, int steps, const KseParams& params);

/// Low-amplitude random smooth periodic field used as the default KSE start.
RealVector kse_random_field(const KseParams& params, std::uint64_t seed);

/// Per-component affine map onto [lo, hi] recorded for later reuse/inversion.
struct ScalingTransform {
  RealVector data_min;
  RealVector data_max;
  Real lo = 0.0;
  Real hi = 1.0;

  RealMatrix apply(const RealMatrix& series) const;
  RealMatrix invert(const RealMatrix& series) const;
  RealVector apply(const RealVector& row) const;
  RealVector invert(const RealVector& row) const;
};

std::pair<RealMatrix, ScalingTransform> minmax_scale(const RealMatrix& series, Real lo, Real hi);

/// Adds i.i.d. N(0, σ²) draws, deterministic per seed.
RealMatrix add_gaussian_noise(const RealMatrix& series, Real sigma, std::uint64_t seed);

}  // namespace hqrc
