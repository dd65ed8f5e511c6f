#pragma once

#include "hqrc/qcore.hpp"
#include "hqrc/types.hpp"

#include <cstdint>
#include <vector>

namespace hqrc {

// Single-reservoir stepping with temporal multiplexing and the higher-order
// ensemble step with classical linear feedback.

struct QrConfig {
  int n_qubits = 0;
  int n_virtual = 1;  // V
  Real tau = 1.0;
  IsingHamiltonian hamiltonian;
  DensityMatrix initial_state;
  Eigensystem eigensys;
  Propagator substep_propagator;  // dt = tau / V

  // Eigenbasis stepping caches: one substep is an elementwise phase multiply
  // and each measurement a single dot product. Pays off once V exceeds the
  // two matrix products of the direct route.
  bool eigenbasis_path = false;
  ComplexMatrix substep_phases;                  // e^{-i(E_m - E_n) dt}
  std::vector<ComplexMatrix> measure_kernels;    // conj(V† σ^z_j V) per site

  int signal_size() const { return n_qubits * n_virtual; }
};

/// Precomputes the eigensystem, substep propagator, and stepping caches.
QrConfig make_qr_config(int n_qubits, int n_virtual, Real tau, IsingHamiltonian hamiltonian,
                        DensityMatrix initial_state);

enum class Topology { Mutual, Forward, None };

struct CouplingMatrices {
  RealMatrix w_in;   // Nqr × Nin, nonnegative, row sums ≤ 1
  RealMatrix w_con;  // Nqr × Ntotal, nonnegative, row sums ≤ 1, no self-loops
  Real alpha = 0.0;  // connection strength
  Topology topology = Topology::Mutual;
  std::vector<int> block_sizes;    // per-reservoir signal widths N_l·V_l
  std::vector<int> block_offsets;  // start column of each reservoir block

  int n_qr() const { return int(block_sizes.size()); }
  int n_total() const { return int(w_con.cols()); }
};

/// Random nonnegative couplings with each row rescaled to sum exactly 1 over
/// its allowed columns. One-dimensional tasks get an all-ones input column.
CouplingMatrices generate_couplings(const std::vector<int>& block_sizes, int n_in, Real alpha,
                                    Topology topology, std::uint64_t seed);

/// u′ = (1-α)·W_in·u + α·W_con·z_prev, clamped to [0,1].
RealVector mix_input(const RealVector& u, const RealVector& z_prev, const CouplingMatrices& c);

/// Inject u′, evolve V substeps, record z_{vj} = (1 + tr[ρ σ^z_j])/2 after
/// each substep. Signal layout is substep-major: index (v-1)·N + (j-1).
void qr_step(DensityMatrix& rho, Real u, const QrConfig& cfg, Eigen::Ref<RealVector> z_out);

/// Flat signal index of (virtual substep v, qubit j), both 1-based, within
/// one reservoir block.
inline int signal_index(int v, int j, int n_qubits) { return (v - 1) * n_qubits + (j - 1); }
inline std::pair<int, int> signal_coords(int index, int n_qubits) {
  return {index / n_qubits + 1, index % n_qubits + 1};
}

struct HqrSystem {
  std::vector<QrConfig> configs;
  std::vector<DensityMatrix> states;
  CouplingMatrices coupling;
  RealVector signal;  // z, initialized to zero
  long step_index = 0;

  int n_qr() const { return int(configs.size()); }
  int n_total() const { return int(signal.size()); }
  int n_in() const { return int(coupling.w_in.cols()); }
};

HqrSystem make_hqr_system(std::vector<QrConfig> configs, CouplingMatrices coupling);

/// Reset states to the configured initial states, z to zero.
void reset(HqrSystem& sys);
/// Reset with fresh Ginibre random initial states.
void reset_random(HqrSystem& sys, Rng& rng);

/// One Alg.-1 step; returns (and stores) z_k.
RealVector hqr_step(HqrSystem& sys, const RealVector& u_k);
RealVector hqr_step(HqrSystem& sys, Real u_k);  // one-dimensional input

/// Steps over all inputs (rows), discarding the first `washout` signal rows.
RealMatrix run_sequence(HqrSystem& sys, const RealMatrix& inputs, int washout);

/// Experiment-level reservoir specification. All reservoirs share the qubit
/// count, V, tau, and J here; the underlying types permit heterogeneity.
struct HqrParams {
  int n_qr = 1;
  int n_qubits = 5;
  int n_virtual = 1;
  Real tau = 4.0;
  Real coupling = 1.0;  // J
  Real alpha = 0.0;
  Topology topology = Topology::Mutual;
  int n_in = 1;
};

/// Deterministic factory: the seed fixes every Hamiltonian coefficient and
/// coupling entry. Initial states default to the maximally mixed state.
struct HqrBuilder {
  HqrParams params;
  std::uint64_t seed = 0;

  HqrSystem build() const;
  /// Same system but with Ginibre random initial states drawn from init_rng.
  HqrSystem build_random_init(Rng& init_rng) const;
};

}  // namespace hqrc
