#include "hqrc/qcore.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace hqrc {

namespace {

ComplexMatrix pauli_2x2(PauliAxis axis) {
  ComplexMatrix m(2, 2);
  switch (axis) {
    case PauliAxis::X:
      m << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
      break;
    case PauliAxis::Y:
      m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
      break;
    case PauliAxis::Z:
      m << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
      break;
  }
  return m;
}

}  // namespace

ComplexMatrix pauli_operator(PauliAxis axis, int site, int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("pauli_operator: n_qubits must be >= 1");
  if (site < 1 || site > n_qubits)
    throw std::invalid_argument("pauli_operator: site " + std::to_string(site) +
                                " out of range [1, " + std::to_string(n_qubits) + "]");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int j = 1; j <= n_qubits; ++j) {
    if (j == site)
      out = kron(out, pauli_2x2(axis));
    else
      out = kron(out, ComplexMatrix::Identity(2, 2));
  }
  return out;
}

DensityMatrix DensityMatrix::ground(int n_qubits) {
  DensityMatrix rho;
  rho.n_qubits = n_qubits;
  rho.data = ComplexMatrix::Zero(Index(1) << n_qubits, Index(1) << n_qubits);
  rho.data(0, 0) = Complex(1, 0);
  return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  DensityMatrix rho;
  rho.n_qubits = n_qubits;
  const Index d = Index(1) << n_qubits;
  rho.data = ComplexMatrix::Identity(d, d) / Real(d);
  return rho;
}

DensityMatrix DensityMatrix::random_ginibre(int n_qubits, Rng& rng) {
  const Index d = Index(1) << n_qubits;
  ComplexMatrix g(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i)
      g(i, j) = Complex(gaussian(rng, 0.0, 1.0), gaussian(rng, 0.0, 1.0));
  ComplexMatrix gg = g * g.adjoint();
  DensityMatrix rho;
  rho.n_qubits = n_qubits;
  rho.data = gg / gg.trace().real();
  return rho;
}

DensityMatrix DensityMatrix::random_pure(int n_qubits, Rng& rng) {
  const Index d = Index(1) << n_qubits;
  ComplexVector psi(d);
  for (Index i = 0; i < d; ++i) psi(i) = Complex(gaussian(rng, 0.0, 1.0), gaussian(rng, 0.0, 1.0));
  psi /= psi.norm();
  DensityMatrix rho;
  rho.n_qubits = n_qubits;
  rho.data = psi * psi.adjoint();
  return rho;
}

bool is_valid_state(const DensityMatrix& rho, Real tol) {
  const ComplexMatrix& m = rho.data;
  if (m.rows() != rho.dim() || m.cols() != rho.dim()) return false;
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(m.trace() - Complex(1, 0)) > tol) return false;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

IsingHamiltonian build_ising(int n_qubits, Real coupling, std::uint64_t seed) {
  if (n_qubits < 1) throw std::invalid_argument("build_ising: n_qubits must be >= 1");
  Rng rng = make_rng(seed);
  IsingHamiltonian h;
  h.n_qubits = n_qubits;
  h.coupling = coupling;
  h.pair_couplings = RealMatrix::Zero(n_qubits, n_qubits);
  for (int i = 0; i < n_qubits; ++i)
    for (int j = i + 1; j < n_qubits; ++j) {
      const Real v = uniform(rng, -1.0, 1.0);
      h.pair_couplings(i, j) = v;
      h.pair_couplings(j, i) = v;
    }
  h.fields = RealVector(n_qubits);
  for (int j = 0; j < n_qubits; ++j) h.fields(j) = uniform(rng, -1.0, 1.0);

  // The pair sum runs over unordered pairs {i, j}: each coupling h_ij acts
  // once, so h₁₂ = 1 on two qubits gives H = J·σ^x₁σ^x₂ exactly.
  const Index d = Index(1) << n_qubits;
  h.matrix = ComplexMatrix::Zero(d, d);
  for (int i = 1; i <= n_qubits; ++i)
    for (int j = i + 1; j <= n_qubits; ++j)
      h.matrix += coupling * h.pair_couplings(i - 1, j - 1) *
                  (pauli_operator(PauliAxis::X, i, n_qubits) *
                   pauli_operator(PauliAxis::X, j, n_qubits));
  for (int j = 1; j <= n_qubits; ++j)
    h.matrix += coupling * h.fields(j - 1) * pauli_operator(PauliAxis::Z, j, n_qubits);
  return h;
}

Eigensystem eigensystem(const ComplexMatrix& h, Real hermiticity_tol) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("eigensystem: matrix must be square");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > hermiticity_tol)
    throw std::invalid_argument("eigensystem: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensystem: diagonalization failed");
  Eigensystem eig;
  eig.energies = es.eigenvalues();
  eig.eigvecs = es.eigenvectors();
  return eig;
}

Eigensystem eigensystem(const IsingHamiltonian& h) { return eigensystem(h.matrix, 1e-10); }

Propagator propagator(const Eigensystem& eig, Real dt) {
  Propagator u;
  u.dt = dt;
  ComplexVector phases(eig.energies.size());
  for (Index m = 0; m < eig.energies.size(); ++m)
    phases(m) = std::exp(Complex(0, -eig.energies(m) * dt));
  u.matrix = eig.eigvecs * phases.asDiagonal() * eig.eigvecs.adjoint();
  return u;
}

DensityMatrix partial_trace_first(const DensityMatrix& rho) {
  if (rho.n_qubits < 2)
    throw std::invalid_argument("partial_trace_first: need at least 2 qubits");
  const Index half = rho.dim() / 2;
  DensityMatrix out;
  out.n_qubits = rho.n_qubits - 1;
  out.data = rho.data.topLeftCorner(half, half) + rho.data.bottomRightCorner(half, half);
  return out;
}

DensityMatrix inject_input(const DensityMatrix& rho, Real u) {
  if (u < 0.0 || u > 1.0)
    throw std::invalid_argument("inject_input: u must be in [0, 1], got " + std::to_string(u));
  ComplexMatrix first(2, 2);
  first << Complex(1.0 - u, 0), Complex(0, 0), Complex(0, 0), Complex(u, 0);
  DensityMatrix out;
  out.n_qubits = rho.n_qubits;
  if (rho.n_qubits == 1) {
    out.data = first * rho.data.trace().real();
  } else {
    const Index half = rho.dim() / 2;
    const ComplexMatrix reduced =
        rho.data.topLeftCorner(half, half) + rho.data.bottomRightCorner(half, half);
    out.data = kron(first, reduced);
  }
  return out;
}

DensityMatrix evolve(const DensityMatrix& rho, const Propagator& u) {
  if (rho.data.rows() != u.matrix.rows())
    throw std::invalid_argument("evolve: dimension mismatch between state and propagator");
  DensityMatrix out;
  out.n_qubits = rho.n_qubits;
  out.data.noalias() = u.matrix * rho.data * u.matrix.adjoint();
  return out;
}

Real measure_z(const DensityMatrix& rho, int site) {
  if (site < 1 || site > rho.n_qubits)
    throw std::invalid_argument("measure_z: site " + std::to_string(site) + " out of range");
  // σ^z_site is diagonal: the sign of basis index i is set by bit (N - site).
  const Index bit = Index(1) << (rho.n_qubits - site);
  Real value = 0.0;
  for (Index i = 0; i < rho.dim(); ++i) {
    const Real sign = (i & bit) ? -1.0 : 1.0;
    value += sign * rho.data(i, i).real();
  }
  return value;
}

Real spectral_gap(const Eigensystem& eig, Real tol) {
  Real gap = -1.0;
  for (Index m = 0; m + 1 < eig.energies.size(); ++m) {
    const Real diff = eig.energies(m + 1) - eig.energies(m);
    if (diff > tol && (gap < 0.0 || diff < gap)) gap = diff;
  }
  if (gap < 0.0)
    throw std::runtime_error("spectral_gap: spectrum is fully degenerate, no gap above tol");
  return gap;
}

Real schatten1_distance(const DensityMatrix& a, const DensityMatrix& b) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.data - b.data, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace hqrc
