#include "hqrc/reservoir.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace hqrc {

QrConfig make_qr_config(int n_qubits, int n_virtual, Real tau, IsingHamiltonian hamiltonian,
                        DensityMatrix initial_state) {
  if (n_virtual < 1) throw std::invalid_argument("make_qr_config: n_virtual must be >= 1");
  if (tau <= 0.0) throw std::invalid_argument("make_qr_config: tau must be positive");
  if (hamiltonian.n_qubits != n_qubits || initial_state.n_qubits != n_qubits)
    throw std::invalid_argument("make_qr_config: qubit counts do not match");

  QrConfig cfg;
  cfg.n_qubits = n_qubits;
  cfg.n_virtual = n_virtual;
  cfg.tau = tau;
  cfg.hamiltonian = std::move(hamiltonian);
  cfg.initial_state = std::move(initial_state);
  cfg.eigensys = eigensystem(cfg.hamiltonian);
  const Real dt = tau / n_virtual;
  cfg.substep_propagator = propagator(cfg.eigensys, dt);

  // Direct UρU† costs two matrix products per substep; the eigenbasis route
  // costs four per step plus O(d²) per substep, so it wins for V >= 3.
  cfg.eigenbasis_path = n_virtual >= 3;
  if (cfg.eigenbasis_path) {
    const Index d = cfg.initial_state.dim();
    ComplexVector ph(d);
    for (Index m = 0; m < d; ++m) ph(m) = std::exp(Complex(0, -cfg.eigensys.energies(m) * dt));
    cfg.substep_phases = ComplexMatrix(d, d);
    for (Index m = 0; m < d; ++m)
      for (Index n = 0; n < d; ++n) cfg.substep_phases(m, n) = ph(m) * std::conj(ph(n));
    cfg.measure_kernels.reserve(n_qubits);
    for (int j = 1; j <= n_qubits; ++j) {
      const ComplexMatrix sz = pauli_operator(PauliAxis::Z, j, n_qubits);
      cfg.measure_kernels.push_back(
          (cfg.eigensys.eigvecs.adjoint() * sz * cfg.eigensys.eigvecs).conjugate());
    }
  }
  return cfg;
}

CouplingMatrices generate_couplings(const std::vector<int>& block_sizes, int n_in, Real alpha,
                                    Topology topology, std::uint64_t seed) {
  const int n_qr = int(block_sizes.size());
  if (n_qr < 1) throw std::invalid_argument("generate_couplings: need at least one reservoir");
  if (n_in < 1) throw std::invalid_argument("generate_couplings: n_in must be >= 1");
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("generate_couplings: alpha must be in [0, 1]");
  if (n_qr == 1 && alpha > 0.0)
    throw std::invalid_argument(
        "generate_couplings: a single reservoir has no feedback targets (self-loops are "
        "forbidden); alpha must be 0");

  CouplingMatrices c;
  c.alpha = alpha;
  c.topology = topology;
  c.block_sizes = block_sizes;
  c.block_offsets.resize(n_qr);
  int n_total = 0;
  for (int l = 0; l < n_qr; ++l) {
    c.block_offsets[l] = n_total;
    n_total += block_sizes[l];
  }

  Rng rng = make_rng(seed);

  if (n_in == 1) {
    c.w_in = RealMatrix::Ones(n_qr, 1);  // common input stream
  } else {
    c.w_in = RealMatrix(n_qr, n_in);
    for (int l = 0; l < n_qr; ++l) {
      Real sum = 0.0;
      for (int i = 0; i < n_in; ++i) {
        c.w_in(l, i) = uniform(rng, 0.0, 1.0);
        sum += c.w_in(l, i);
      }
      c.w_in.row(l) /= sum;
    }
  }

  c.w_con = RealMatrix::Zero(n_qr, n_total);
  for (int l = 0; l < n_qr; ++l) {
    std::vector<int> allowed;
    if (topology == Topology::Mutual) {
      for (int m = 0; m < n_qr; ++m) {
        if (m == l) continue;
        for (int i = 0; i < block_sizes[m]; ++i) allowed.push_back(c.block_offsets[m] + i);
      }
    } else if (topology == Topology::Forward && l > 0) {
      for (int i = 0; i < block_sizes[l - 1]; ++i) allowed.push_back(c.block_offsets[l - 1] + i);
    }
    if (allowed.empty()) {
      // Structurally empty rows (forward row 1, single reservoir, or no
      // feedback) stay zero.
      if (topology == Topology::None || n_qr == 1 || (topology == Topology::Forward && l == 0))
        continue;
      throw std::invalid_argument("generate_couplings: topology leaves row " +
                                  std::to_string(l + 1) + " with no allowed columns");
    }
    Real sum = 0.0;
    for (int idx : allowed) {
      c.w_con(l, idx) = uniform(rng, 0.0, 1.0);
      sum += c.w_con(l, idx);
    }
    for (int idx : allowed) c.w_con(l, idx) /= sum;
  }
  return c;
}

RealVector mix_input(const RealVector& u, const RealVector& z_prev, const CouplingMatrices& c) {
  RealVector mixed = (1.0 - c.alpha) * (c.w_in * u) + c.alpha * (c.w_con * z_prev);
  for (Index i = 0; i < mixed.size(); ++i) mixed(i) = clamp01(mixed(i));
  return mixed;
}

void qr_step(DensityMatrix& rho, Real u, const QrConfig& cfg, Eigen::Ref<RealVector> z_out) {
  const int n = cfg.n_qubits;
  rho = inject_input(rho, u);
  if (!cfg.eigenbasis_path) {
    for (int v = 1; v <= cfg.n_virtual; ++v) {
      rho = evolve(rho, cfg.substep_propagator);
      for (int j = 1; j <= n; ++j)
        z_out(signal_index(v, j, n)) = (1.0 + measure_z(rho, j)) / 2.0;
    }
    return;
  }

  const ComplexMatrix& vecs = cfg.eigensys.eigvecs;
  ComplexMatrix work = vecs.adjoint() * rho.data * vecs;
  for (int v = 1; v <= cfg.n_virtual; ++v) {
    work.array() *= cfg.substep_phases.array();
    for (int j = 1; j <= n; ++j) {
      const Real s = (work.array() * cfg.measure_kernels[j - 1].array()).sum().real();
      z_out(signal_index(v, j, n)) = (1.0 + s) / 2.0;
    }
  }
  rho.data.noalias() = vecs * work * vecs.adjoint();
}

HqrSystem make_hqr_system(std::vector<QrConfig> configs, CouplingMatrices coupling) {
  if (configs.empty()) throw std::invalid_argument("make_hqr_system: no reservoirs");
  if (int(configs.size()) != coupling.n_qr())
    throw std::invalid_argument("make_hqr_system: coupling row count does not match reservoirs");
  int n_total = 0;
  for (size_t l = 0; l < configs.size(); ++l) {
    if (configs[l].signal_size() != coupling.block_sizes[l])
      throw std::invalid_argument("make_hqr_system: coupling block sizes do not match configs");
    n_total += configs[l].signal_size();
  }
  if (coupling.n_total() != n_total)
    throw std::invalid_argument("make_hqr_system: coupling column count does not match signals");

  HqrSystem sys;
  sys.coupling = std::move(coupling);
  sys.states.reserve(configs.size());
  for (const QrConfig& cfg : configs) sys.states.push_back(cfg.initial_state);
  sys.configs = std::move(configs);
  sys.signal = RealVector::Zero(n_total);
  return sys;
}

void reset(HqrSystem& sys) {
  for (size_t l = 0; l < sys.configs.size(); ++l) sys.states[l] = sys.configs[l].initial_state;
  sys.signal.setZero();
  sys.step_index = 0;
}

void reset_random(HqrSystem& sys, Rng& rng) {
  for (size_t l = 0; l < sys.configs.size(); ++l)
    sys.states[l] = DensityMatrix::random_ginibre(sys.configs[l].n_qubits, rng);
  sys.signal.setZero();
  sys.step_index = 0;
}

RealVector hqr_step(HqrSystem& sys, const RealVector& u_k) {
  if (u_k.size() != sys.n_in())
    throw std::invalid_argument("hqr_step: input dimension mismatch");
  const RealVector mixed = mix_input(u_k, sys.signal, sys.coupling);
  for (int l = 0; l < sys.n_qr(); ++l) {
    const int offset = sys.coupling.block_offsets[l];
    qr_step(sys.states[l], mixed(l), sys.configs[l],
            sys.signal.segment(offset, sys.configs[l].signal_size()));
  }
  ++sys.step_index;
  return sys.signal;
}

RealVector hqr_step(HqrSystem& sys, Real u_k) {
  RealVector u(1);
  u(0) = u_k;
  return hqr_step(sys, u);
}

RealMatrix run_sequence(HqrSystem& sys, const RealMatrix& inputs, int washout) {
  if (inputs.rows() <= washout)
    throw std::invalid_argument("run_sequence: input sequence must be longer than the washout");
  RealMatrix z(inputs.rows() - washout, sys.n_total());
  for (Index k = 0; k < inputs.rows(); ++k) {
    hqr_step(sys, RealVector(inputs.row(k)));
    if (k >= washout) z.row(k - washout) = sys.signal;
  }
  return z;
}

HqrSystem HqrBuilder::build() const {
  std::vector<QrConfig> configs;
  std::vector<int> block_sizes;
  configs.reserve(params.n_qr);
  for (int l = 0; l < params.n_qr; ++l) {
    IsingHamiltonian h = build_ising(params.n_qubits, params.coupling,
                                     derive_seed(seed, "hamiltonian/" + std::to_string(l)));
    configs.push_back(make_qr_config(params.n_qubits, params.n_virtual, params.tau, std::move(h),
                                     DensityMatrix::maximally_mixed(params.n_qubits)));
    block_sizes.push_back(configs.back().signal_size());
  }
  CouplingMatrices coupling = generate_couplings(block_sizes, params.n_in, params.alpha,
                                                 params.topology, derive_seed(seed, "coupling"));
  return make_hqr_system(std::move(configs), std::move(coupling));
}

HqrSystem HqrBuilder::build_random_init(Rng& init_rng) const {
  HqrSystem sys = build();
  reset_random(sys, init_rng);
  return sys;
}

}  // namespace hqrc
