#pragma once

#include "hqrc/rng.hpp"
#include "hqrc/types.hpp"

#include <cstdint>

namespace hqrc {

// Exact dense linear algebra for single-reservoir quantum states. Qubit 1 is
// the most significant index in the lexicographic tensor basis; all partial
// traces and injections assume this ordering.

enum class PauliAxis { X, Y, Z };

/// I ⊗ … ⊗ σ^axis (factor `site`, 1-based) ⊗ … ⊗ I on n_qubits spins.
ComplexMatrix pauli_operator(PauliAxis axis, int site, int n_qubits);

struct DensityMatrix {
  int n_qubits = 0;
  ComplexMatrix data;

  Index dim() const { return Index(1) << n_qubits; }

  static DensityMatrix ground(int n_qubits);           // |0…0⟩⟨0…0|
  static DensityMatrix maximally_mixed(int n_qubits);  // I / 2^N
  /// Full-rank random state GG†/tr(GG†) with G a square Ginibre matrix.
  static DensityMatrix random_ginibre(int n_qubits, Rng& rng);
  /// Haar-random pure state |ψ⟩⟨ψ| (rank-one Ginibre).
  static DensityMatrix random_pure(int n_qubits, Rng& rng);
};

/// Hermiticity / unit trace / positive semidefiniteness within tol.
bool is_valid_state(const DensityMatrix& rho, Real tol = 1e-10);

struct IsingHamiltonian {
  int n_qubits = 0;
  Real coupling = 0.0;          // J
  RealMatrix pair_couplings;    // symmetric h_ij, zero diagonal
  RealVector fields;            // g_j
  ComplexMatrix matrix;         // J·Σ_{i≠j} h_ij σ^x_i σ^x_j + J·Σ_j g_j σ^z_j
};

/// Fully connected transverse-field Ising model with h_ij (i<j) and g_j drawn
/// i.i.d. uniform on [-1,1] from the seeded stream.
IsingHamiltonian build_ising(int n_qubits, Real coupling, std::uint64_t seed);

struct Eigensystem {
  RealVector energies;    // ascending
  ComplexMatrix eigvecs;  // unitary, columns match energies
};

Eigensystem eigensystem(const IsingHamiltonian& h);
/// Diagonalize an explicit Hermitian matrix; throws if not Hermitian.
Eigensystem eigensystem(const ComplexMatrix& h, Real hermiticity_tol = 1e-10);

struct Propagator {
  Real dt = 0.0;
  ComplexMatrix matrix;  // e^{-iH dt}
};

Propagator propagator(const Eigensystem& eig, Real dt);

/// Trace out the first (most significant) qubit. Requires N ≥ 2.
DensityMatrix partial_trace_first(const DensityMatrix& rho);

/// ((1-u)|0⟩⟨0| + u|1⟩⟨1|) ⊗ tr₁(ρ). Requires u ∈ [0,1]; callers clamp first.
DensityMatrix inject_input(const DensityMatrix& rho, Real u);

/// ρ ↦ UρU†.
DensityMatrix evolve(const DensityMatrix& rho, const Propagator& u);

/// tr(ρ σ^z_site) ∈ [-1, 1], site 1-based.
Real measure_z(const DensityMatrix& rho, int site);

/// Smallest consecutive energy difference strictly greater than tol.
Real spectral_gap(const Eigensystem& eig, Real tol = 1e-9);

/// Schatten-1 (trace norm) distance via the spectrum of the Hermitian
/// difference.
Real schatten1_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace hqrc
