#include "hqrc/learning.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace hqrc {

RealMatrix assemble_design(const RealMatrix& z) {
  if (z.rows() == 0) throw std::invalid_argument("assemble_design: empty signal matrix");
  RealMatrix x(z.rows(), z.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(z.cols()) = z;
  return x;
}

ReadoutModel ridge_fit(const RealMatrix& design, const RealMatrix& targets, Real beta) {
  if (design.rows() < 1) throw std::invalid_argument("ridge_fit: need at least one row");
  if (design.rows() != targets.rows())
    throw std::invalid_argument("ridge_fit: design and target row counts differ");
  if (beta < 0.0) throw std::invalid_argument("ridge_fit: beta must be nonnegative");

  RealMatrix gram = design.transpose() * design;
  gram.diagonal().array() += beta;
  const RealMatrix rhs = design.transpose() * targets;

  Eigen::LDLT<RealMatrix> ldlt(gram);
  if (beta == 0.0) {
    // The normal equations stay consistent even when rank-deficient, so the
    // pivot spectrum is the singularity signal.
    const RealVector d = ldlt.vectorD().cwiseAbs();
    if (d.minCoeff() <= d.maxCoeff() * 1e-12)
      throw std::runtime_error(
          "ridge_fit: normal equations are singular at beta=0; use a positive ridge parameter");
  }
  RealMatrix w = ldlt.solve(rhs);
  if (!w.allFinite())
    throw std::runtime_error(
        "ridge_fit: solve produced non-finite weights; use a positive ridge parameter");

  ReadoutModel model;
  model.weights = std::move(w);
  model.ridge_beta = beta;
  return model;
}

RealVector predict(const ReadoutModel& model, const RealVector& z) {
  if (z.size() != model.n_signals())
    throw std::invalid_argument("predict: signal dimension mismatch");
  return model.weights.row(0).transpose() +
         model.weights.bottomRows(model.n_signals()).transpose() * z;
}

RealMatrix predict_all(const ReadoutModel& model, const RealMatrix& z) {
  if (z.cols() != model.n_signals())
    throw std::invalid_argument("predict_all: signal dimension mismatch");
  RealMatrix out = z * model.weights.bottomRows(model.n_signals());
  out.rowwise() += model.weights.row(0);
  return out;
}

Real nmse(const RealVector& y, const RealVector& target) {
  if (y.size() != target.size()) throw std::invalid_argument("nmse: length mismatch");
  const Real denom = target.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("nmse: target is identically zero");
  return (y - target).squaredNorm() / denom;
}

RealVector nrmse_series(const RealMatrix& pred, const RealMatrix& target,
                        const RealVector& sigma_hat) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw std::invalid_argument("nrmse_series: shape mismatch");
  if (sigma_hat.size() != pred.cols())
    throw std::invalid_argument("nrmse_series: sigma dimension mismatch");
  if ((sigma_hat.array() <= 0.0).any())
    throw std::invalid_argument("nrmse_series: sigma components must be positive");
  const Index m = pred.cols();
  RealVector out(pred.rows());
  for (Index t = 0; t < pred.rows(); ++t) {
    const RealVector diff = (pred.row(t) - target.row(t)).transpose();
    out(t) = std::sqrt((diff.array() / sigma_hat.array()).square().sum() / Real(m));
  }
  return out;
}

Real trajectory_rmse(const RealVector& a, const RealVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("trajectory_rmse: length mismatch");
  if (a.size() == 0) throw std::invalid_argument("trajectory_rmse: empty sequences");
  return std::sqrt((a - b).squaredNorm() / Real(a.size()));
}

EsnModel esn_init(int d_h, int d_o, Real radius, Real degree, Real noise_level,
                  std::uint64_t seed) {
  if (radius <= 0.0 || radius >= 1.0)
    throw std::invalid_argument("esn_init: spectral radius must be in (0, 1)");
  if (degree >= d_h)
    throw std::invalid_argument("esn_init: degree must be smaller than the hidden size");

  Rng rng = make_rng(seed);
  EsnModel model;
  model.d_h = d_h;
  model.d_o = d_o;
  model.spectral_radius = radius;
  model.degree = degree;
  model.noise_level = noise_level;
  model.hidden = RealVector::Zero(d_h);

  model.w_hi = RealMatrix(d_h, d_o);
  for (int i = 0; i < d_h; ++i)
    for (int j = 0; j < d_o; ++j) model.w_hi(i, j) = uniform(rng, -1.0, 1.0);

  const Real p = degree / d_h;
  model.w_hh = RealMatrix::Zero(d_h, d_h);
  for (int i = 0; i < d_h; ++i)
    for (int j = 0; j < d_h; ++j) {
      const Real gate = uniform(rng, 0.0, 1.0);
      const Real value = uniform(rng, -1.0, 1.0);
      if (gate < p) model.w_hh(i, j) = value;
    }

  Eigen::EigenSolver<RealMatrix> es(model.w_hh, /*computeEigenvectors=*/false);
  const Real rho = es.eigenvalues().cwiseAbs().maxCoeff();
  if (rho <= 0.0)
    throw std::runtime_error("esn_init: recurrent matrix has zero spectral radius");
  model.w_hh *= radius / rho;
  return model;
}

RealVector esn_step(const EsnModel& model, const RealVector& h_prev, const RealVector& obs) {
  if (h_prev.size() != model.d_h || obs.size() != model.d_o)
    throw std::invalid_argument("esn_step: dimension mismatch");
  return (model.w_hi * obs + model.w_hh * h_prev).array().tanh();
}

}  // namespace hqrc
