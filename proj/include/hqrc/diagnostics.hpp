#pragma once

#include "hqrc/learning.hpp"
#include "hqrc/reservoir.hpp"
#include "hqrc/types.hpp"

#include <cstdint>

namespace hqrc {

// Stability and capacity diagnostics: the QESP index, memory
// function/capacity, and the spectral analysis of the constant-input CPTP
// superoperator.

struct QespConfig {
  int washout = 9000;  // T
  int eval_steps = 1000;  // E
  int trials = 10;  // P
};

/// Average L2 deviation between post-washout signal trajectories started from
/// random pure initial states and the reference trajectory from the fixed
/// initial state, on identical inputs. The reference is simulated once per
/// call and reused across trials.
Real qesp_index(const HqrBuilder& builder, const RealMatrix& inputs, const QespConfig& cfg,
                std::uint64_t seed);

struct PhaseSplits {
  int washout = 1000;
  int train = 3000;
  int eval = 1000;

  int total() const { return washout + train + eval; }
};

/// Squared Pearson correlation between two sequences, in [0, 1]; defined as 0
/// when either variance vanishes.
Real squared_correlation(const RealVector& y, const RealVector& target);

/// MF(d): capacity to reconstruct the input d steps back, with a ridge
/// readout fit on the training window and scored on the evaluation window.
Real memory_function(const HqrBuilder& builder, int delay, const PhaseSplits& splits,
                     std::uint64_t seed);

struct MemoryCurve {
  RealVector mf;  // MF(0..d_max)
  Real mc = 0.0;  // Σ MF(d)
};

/// One reservoir run shared across all delays: the design Gram factorization
/// is reused for every d.
MemoryCurve memory_curve(const HqrBuilder& builder, int d_max, const PhaseSplits& splits,
                         std::uint64_t seed, Real ridge_beta = 1e-7);

/// Truncated MC = Σ_{d=0}^{d_max} MF(d), averaged over trials with fresh
/// Hamiltonian and coupling draws.
Real memory_capacity(const HqrBuilder& builder, int d_max, int trials, std::uint64_t seed,
                     const PhaseSplits& splits = {});

struct SuperOperator {
  int n_qubits = 0;
  Real input_value = 0.0;
  Real tau = 0.0;
  ComplexMatrix matrix;  // 4^N × 4^N, acts on column-stacked density matrices
};

/// Matrix of ρ ↦ U_τ (ϱ_u ⊗ tr₁ρ) U_τ†, built column-by-column by applying
/// the map to matrix-unit basis elements.
SuperOperator superoperator(const IsingHamiltonian& h, Real u, Real tau);

/// Apply the superoperator to a state directly.
DensityMatrix apply_superoperator(const SuperOperator& op, const DensityMatrix& rho);

inline constexpr Real kInvLambda2Sentinel = 1e15;  // reported when |λ₂| ≈ 0

struct SpectrumResult {
  ComplexVector eigenvalues;  // sorted by descending magnitude
  DensityMatrix fixed_point;  // R₁, rescaled to unit trace
  Real inv_lambda2 = 0.0;     // |λ₂|⁻¹
};

SpectrumResult cptp_spectrum(const SuperOperator& op);

}  // namespace hqrc
