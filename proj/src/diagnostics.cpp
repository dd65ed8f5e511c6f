#include "hqrc/diagnostics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqrc {

Real qesp_index(const HqrBuilder& builder, const RealMatrix& inputs, const QespConfig& cfg,
                std::uint64_t seed) {
  if (cfg.washout < 1 || cfg.eval_steps < 1 || cfg.trials < 1)
    throw std::invalid_argument("qesp_index: washout, eval, and trials must be >= 1");
  if (inputs.rows() < cfg.washout + cfg.eval_steps)
    throw std::invalid_argument("qesp_index: input sequence shorter than washout + eval");

  const Index total = cfg.washout + cfg.eval_steps;
  const RealMatrix drive = inputs.topRows(total);

  HqrSystem reference = builder.build();
  const RealMatrix ref_signals = run_sequence(reference, drive, cfg.washout);

  Real mu = 0.0;
  for (int p = 0; p < cfg.trials; ++p) {
    Rng init_rng = make_rng(derive_seed(seed, "qesp/init/" + std::to_string(p)));
    // Random pure initial states: full-rank Ginibre draws concentrate near
    // the maximally mixed reference and would mask the unstable regime.
    HqrSystem perturbed = builder.build();
    for (int l = 0; l < perturbed.n_qr(); ++l)
      perturbed.states[l] =
          DensityMatrix::random_pure(perturbed.configs[l].n_qubits, init_rng);
    const RealMatrix signals = run_sequence(perturbed, drive, cfg.washout);
    Real mu_p = 0.0;
    for (Index k = 0; k < signals.rows(); ++k)
      mu_p += (signals.row(k) - ref_signals.row(k)).norm();
    mu += mu_p / Real(signals.rows());
  }
  return mu / Real(cfg.trials);
}

Real squared_correlation(const RealVector& y, const RealVector& target) {
  if (y.size() != target.size())
    throw std::invalid_argument("squared_correlation: length mismatch");
  const Real n = Real(y.size());
  const Real my = y.mean();
  const Real mt = target.mean();
  const Real cov = ((y.array() - my) * (target.array() - mt)).sum() / n;
  const Real vy = (y.array() - my).square().sum() / n;
  const Real vt = (target.array() - mt).square().sum() / n;
  if (vy <= 0.0 || vt <= 0.0) return 0.0;
  return cov * cov / (vy * vt);
}

namespace {

struct MemoryRun {
  RealMatrix design_train;  // with bias column
  RealMatrix design_eval;
  RealVector inputs;  // raw [0,1] drive
};

MemoryRun memory_run(const HqrBuilder& builder, const PhaseSplits& splits, std::uint64_t seed) {
  Rng input_rng = make_rng(derive_seed(seed, "memory/inputs"));
  const int total = splits.total();
  RealMatrix inputs(total, 1);
  for (int k = 0; k < total; ++k) inputs(k, 0) = uniform(input_rng, 0.0, 1.0);

  HqrSystem sys = builder.build();
  const RealMatrix z = run_sequence(sys, inputs, splits.washout);

  MemoryRun run;
  run.inputs = inputs.col(0);
  const RealMatrix design = assemble_design(z);
  run.design_train = design.topRows(splits.train);
  run.design_eval = design.bottomRows(splits.eval);
  return run;
}

Real memory_function_from_run(const MemoryRun& run, int delay, const PhaseSplits& splits,
                              Real ridge_beta) {
  const int train_begin = splits.washout;  // first recorded step index
  RealVector target_train(splits.train);
  for (int k = 0; k < splits.train; ++k) {
    const int step = train_begin + k;
    target_train(k) = step - delay >= 0 ? run.inputs(step - delay) : 0.0;
  }
  RealVector target_eval(splits.eval);
  const int eval_begin = splits.washout + splits.train;
  for (int k = 0; k < splits.eval; ++k) {
    const int step = eval_begin + k;
    target_eval(k) = step - delay >= 0 ? run.inputs(step - delay) : 0.0;
  }

  const ReadoutModel model = ridge_fit(run.design_train, target_train, ridge_beta);
  const RealVector y = run.design_eval * model.weights;
  return squared_correlation(y, target_eval);
}

}  // namespace

Real memory_function(const HqrBuilder& builder, int delay, const PhaseSplits& splits,
                     std::uint64_t seed) {
  if (delay < 0) throw std::invalid_argument("memory_function: delay must be nonnegative");
  const MemoryRun run = memory_run(builder, splits, seed);
  return memory_function_from_run(run, delay, splits, 1e-7);
}

MemoryCurve memory_curve(const HqrBuilder& builder, int d_max, const PhaseSplits& splits,
                         std::uint64_t seed, Real ridge_beta) {
  if (d_max < 0) throw std::invalid_argument("memory_curve: d_max must be nonnegative");
  const MemoryRun run = memory_run(builder, splits, seed);
  MemoryCurve curve;
  curve.mf = RealVector(d_max + 1);
  for (int d = 0; d <= d_max; ++d)
    curve.mf(d) = memory_function_from_run(run, d, splits, ridge_beta);
  curve.mc = curve.mf.sum();
  return curve;
}

Real memory_capacity(const HqrBuilder& builder, int d_max, int trials, std::uint64_t seed,
                     const PhaseSplits& splits) {
  if (trials < 1) throw std::invalid_argument("memory_capacity: trials must be >= 1");
  Real mc = 0.0;
  for (int t = 0; t < trials; ++t) {
    HqrBuilder trial = builder;
    trial.seed = derive_seed(seed, "mc/trial/" + std::to_string(t));
    mc += memory_curve(trial, d_max, splits, trial.seed).mc;
  }
  return mc / Real(trials);
}

SuperOperator superoperator(const IsingHamiltonian& h, Real u, Real tau) {
  if (u < 0.0 || u > 1.0)
    throw std::invalid_argument("superoperator: input value must be in [0, 1]");
  const Eigensystem eig = eigensystem(h);
  const Propagator prop = propagator(eig, tau);
  const Index d = Index(1) << h.n_qubits;
  const Index half = d / 2;

  ComplexMatrix first(2, 2);
  first << Complex(1.0 - u, 0), Complex(0, 0), Complex(0, 0), Complex(u, 0);

  SuperOperator op;
  op.n_qubits = h.n_qubits;
  op.input_value = u;
  op.tau = tau;
  op.matrix = ComplexMatrix(d * d, d * d);

  // Column c is the image of the matrix unit E_{ab}, c = a + b·d. The map is
  // linear, so probing the basis determines it.
  ComplexMatrix basis = ComplexMatrix::Zero(d, d);
  for (Index b = 0; b < d; ++b)
    for (Index a = 0; a < d; ++a) {
      basis(a, b) = Complex(1, 0);
      ComplexMatrix reduced;
      if (h.n_qubits == 1)
        reduced = ComplexMatrix::Constant(1, 1, basis.trace());
      else
        reduced = basis.topLeftCorner(half, half) + basis.bottomRightCorner(half, half);
      const ComplexMatrix injected = kron(first, reduced);
      const ComplexMatrix image = prop.matrix * injected * prop.matrix.adjoint();
      op.matrix.col(a + b * d) = Eigen::Map<const ComplexVector>(image.data(), d * d);
      basis(a, b) = Complex(0, 0);
    }
  return op;
}

DensityMatrix apply_superoperator(const SuperOperator& op, const DensityMatrix& rho) {
  if (rho.n_qubits != op.n_qubits)
    throw std::invalid_argument("apply_superoperator: qubit count mismatch");
  const ComplexVector image = op.matrix * vectorize(rho.data);
  DensityMatrix out;
  out.n_qubits = rho.n_qubits;
  out.data = unvectorize(image, rho.dim());
  return out;
}

SpectrumResult cptp_spectrum(const SuperOperator& op) {
  if (!op.matrix.allFinite()) throw std::invalid_argument("cptp_spectrum: non-finite matrix");
  Eigen::ComplexEigenSolver<ComplexMatrix> es(op.matrix, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("cptp_spectrum: eigensolver failed to converge");

  const Index n = es.eigenvalues().size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    return std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(j));
  });

  SpectrumResult result;
  result.eigenvalues = ComplexVector(n);
  for (Index i = 0; i < n; ++i) result.eigenvalues(i) = es.eigenvalues()(order[i]);

  const Index d = Index(1) << op.n_qubits;
  ComplexMatrix r1 = unvectorize(es.eigenvectors().col(order[0]), d);
  const Complex tr = r1.trace();
  if (std::abs(tr) < 1e-12)
    throw std::runtime_error("cptp_spectrum: traceless leading eigenmatrix");
  r1 /= tr;
  result.fixed_point.n_qubits = op.n_qubits;
  result.fixed_point.data = std::move(r1);

  const Real lambda2 = n > 1 ? std::abs(result.eigenvalues(1)) : 0.0;
  result.inv_lambda2 = lambda2 > 1.0 / kInvLambda2Sentinel ? 1.0 / lambda2 : kInvLambda2Sentinel;
  return result;
}

}  // namespace hqrc
