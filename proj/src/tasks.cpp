#include "hqrc/tasks.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hqrc {

NarmaSeries narma_series(const NarmaParams& params, const RealVector& inputs_raw) {
  const int n = params.order;
  if (n < 1) throw std::invalid_argument("narma_series: order must be >= 1");
  const Index len = inputs_raw.size();

  NarmaSeries out;
  out.inputs = params.input_lo + (params.input_hi - params.input_lo) * inputs_raw.array();
  out.targets = RealVector::Zero(len);

  auto y_at = [&](Index k) { return k < 0 ? 0.0 : out.targets(k); };
  auto u_at = [&](Index k) { return k < 0 ? 0.0 : out.inputs(k); };

  for (Index k = 0; k < len; ++k) {
    Real history = 0.0;
    for (int j = 0; j < n; ++j) history += y_at(k - j - 1);
    const Real y = params.kappa * y_at(k - 1) + params.eta * y_at(k - 1) * history +
                   params.gamma * u_at(k - n + 1) * u_at(k) + params.delta;
    if (!std::isfinite(y) || std::abs(y) > 10.0)
      throw std::runtime_error("narma_series: recurrence diverged at step " + std::to_string(k));
    out.targets(k) = y;
  }
  return out;
}

RealVector delay_target(const RealVector& inputs, int d) {
  if (d < 0) throw std::invalid_argument("delay_target: delay must be nonnegative");
  if (d >= inputs.size())
    throw std::invalid_argument("delay_target: delay exceeds the sequence length");
  RealVector out = RealVector::Zero(inputs.size());
  out.tail(inputs.size() - d) = inputs.head(inputs.size() - d);
  return out;
}

namespace {

RealVector lorenz_rhs(const RealVector& x, const LorenzParams& p) {
  RealVector f(3);
  f(0) = p.a * (x(1) - x(0));
  f(1) = x(0) * (p.b - x(2)) - x(1);
  f(2) = x(0) * x(1) - p.c * x(2);
  return f;
}

}  // namespace

RealMatrix lorenz_rk4(const RealVector& x0, int steps, const LorenzParams& params) {
  if (x0.size() != 3) throw std::invalid_argument("lorenz_rk4: state must be 3-dimensional");
  if (params.dt <= 0.0) throw std::invalid_argument("lorenz_rk4: dt must be positive");
  RealMatrix traj(steps + 1, 3);
  RealVector x = x0;
  traj.row(0) = x;
  const Real h = params.dt;
  for (int k = 1; k <= steps; ++k) {
    const RealVector k1 = lorenz_rhs(x, params);
    const RealVector k2 = lorenz_rhs(x + 0.5 * h * k1, params);
    const RealVector k3 = lorenz_rhs(x + 0.5 * h * k2, params);
    const RealVector k4 = lorenz_rhs(x + h * k3, params);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) throw std::runtime_error("lorenz_rk4: non-finite state at step " +
                                                 std::to_string(k));
    traj.row(k) = x;
  }
  return traj;
}

namespace {

struct KseWorkspace {
  Eigen::FFT<Real> fft;
  RealVector wavenumbers;  // q_k in FFT order
  ComplexVector e_full;    // e^{h L}
  ComplexVector e_half;    // e^{h L / 2}
  ComplexVector q_coef, f1, f2, f3;
  ComplexVector deriv;  // -i q / 2 factors for the nonlinear term
};

// Linear symbol of the KSE: growth rate q² - q⁴ per mode.
RealVector kse_linear_symbol(const KseParams& p) {
  RealVector q(p.grid);
  for (int k = 0; k < p.grid; ++k) {
    const int signed_k = k <= p.grid / 2 ? k : k - p.grid;
    q(k) = 2.0 * std::numbers::pi * signed_k / p.domain_length;
  }
  return q;
}

// ETDRK4 φ-weights by contour quadrature: each stiff eigenvalue gets a unit
// circle of sample points around h·L_k.
KseWorkspace make_kse_workspace(const KseParams& p) {
  KseWorkspace w;
  const int m = p.grid;
  const Real h = p.dt;
  w.wavenumbers = kse_linear_symbol(p);
  RealVector lin(m);
  for (int k = 0; k < m; ++k) {
    const Real q2 = w.wavenumbers(k) * w.wavenumbers(k);
    lin(k) = q2 - q2 * q2;
  }
  w.e_full = (h * lin.array()).exp().cast<Complex>();
  w.e_half = (0.5 * h * lin.array()).exp().cast<Complex>();

  const int n_pts = p.contour_points;
  w.q_coef = ComplexVector::Zero(m);
  w.f1 = ComplexVector::Zero(m);
  w.f2 = ComplexVector::Zero(m);
  w.f3 = ComplexVector::Zero(m);
  for (int k = 0; k < m; ++k) {
    Complex q_sum = 0, f1_sum = 0, f2_sum = 0, f3_sum = 0;
    for (int r = 0; r < n_pts; ++r) {
      const Real theta = 2.0 * std::numbers::pi * (r + 0.5) / n_pts;
      const Complex z = h * lin(k) + std::exp(Complex(0, theta));
      const Complex ez = std::exp(z);
      q_sum += (std::exp(z / 2.0) - 1.0) / z;
      f1_sum += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / (z * z * z);
      f2_sum += (2.0 + z + ez * (-2.0 + z)) / (z * z * z);
      f3_sum += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / (z * z * z);
    }
    // The contour points are conjugate-symmetric and the symbol is real, so
    // the means are real up to rounding.
    w.q_coef(k) = h * (q_sum / Real(n_pts)).real();
    w.f1(k) = h * (f1_sum / Real(n_pts)).real();
    w.f2(k) = h * (f2_sum / Real(n_pts)).real();
    w.f3(k) = h * (f3_sum / Real(n_pts)).real();
  }

  w.deriv = ComplexVector(m);
  for (int k = 0; k < m; ++k) w.deriv(k) = Complex(0, -0.5 * w.wavenumbers(k));
  // Zero the unresolved Nyquist derivative mode of the even grid.
  w.deriv(m / 2) = 0;
  return w;
}

// N(û) = -(i q / 2) F[(F⁻¹ û)²].
ComplexVector kse_nonlinear(KseWorkspace& w, const ComplexVector& u_hat) {
  const Index m = u_hat.size();
  std::vector<Complex> spec(u_hat.data(), u_hat.data() + m);
  std::vector<Real> phys(m);
  w.fft.inv(phys, spec);
  for (Index i = 0; i < m; ++i) phys[i] *= phys[i];
  w.fft.fwd(spec, phys);
  ComplexVector out(m);
  for (Index k = 0; k < m; ++k) out(k) = w.deriv(k) * spec[size_t(k)];
  return out;
}

}  // namespace

RealMatrix kse_etdrk4(const RealVector& u0, int steps, const KseParams& params) {
  if (params.grid % 2 != 0) throw std::invalid_argument("kse_etdrk4: grid must be even");
  if (u0.size() != params.grid)
    throw std::invalid_argument("kse_etdrk4: initial field does not match the grid");

  KseWorkspace w = make_kse_workspace(params);
  const int m = params.grid;

  std::vector<Real> phys(u0.data(), u0.data() + m);
  std::vector<Complex> spec(m);
  w.fft.fwd(spec, phys);
  ComplexVector v = Eigen::Map<ComplexVector>(spec.data(), m);

  RealMatrix traj(steps + 1, m);
  traj.row(0) = u0;

  auto to_real = [&](const ComplexVector& u_hat, Index row) {
    std::vector<Complex> s(u_hat.data(), u_hat.data() + m);
    std::vector<Real> x(m);
    w.fft.inv(x, s);
    for (int i = 0; i < m; ++i) traj(row, i) = x[size_t(i)];
  };

  for (int k = 1; k <= steps; ++k) {
    const ComplexVector nv = kse_nonlinear(w, v);
    const ComplexVector a = w.e_half.cwiseProduct(v) + w.q_coef.cwiseProduct(nv);
    const ComplexVector na = kse_nonlinear(w, a);
    const ComplexVector b = w.e_half.cwiseProduct(v) + w.q_coef.cwiseProduct(na);
    const ComplexVector nb = kse_nonlinear(w, b);
    const ComplexVector c =
        w.e_half.cwiseProduct(a) + w.q_coef.cwiseProduct(2.0 * nb - nv);
    const ComplexVector nc = kse_nonlinear(w, c);
    v = w.e_full.cwiseProduct(v) + w.f1.cwiseProduct(nv) +
        2.0 * w.f2.cwiseProduct(na + nb) + w.f3.cwiseProduct(nc);
    to_real(v, k);
    if (!traj.row(k).allFinite())
      throw std::runtime_error("kse_etdrk4: non-finite field at step " + std::to_string(k));
  }
  return traj;
}

RealVector kse_random_field(const KseParams& params, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  RealVector u = RealVector::Zero(params.grid);
  for (int mode = 1; mode <= 3; ++mode) {
    const Real amp = uniform(rng, -0.3, 0.3);
    const Real phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < params.grid; ++i) {
      const Real x = params.domain_length * i / params.grid;
      u(i) += amp * std::cos(2.0 * std::numbers::pi * mode * x / params.domain_length + phase);
    }
  }
  return u;
}

RealMatrix ScalingTransform::apply(const RealMatrix& series) const {
  RealMatrix out(series.rows(), series.cols());
  for (Index j = 0; j < series.cols(); ++j)
    out.col(j) = lo + (hi - lo) * (series.col(j).array() - data_min(j)) /
                          (data_max(j) - data_min(j));
  return out;
}

RealMatrix ScalingTransform::invert(const RealMatrix& series) const {
  RealMatrix out(series.rows(), series.cols());
  for (Index j = 0; j < series.cols(); ++j)
    out.col(j) = data_min(j) + (data_max(j) - data_min(j)) * (series.col(j).array() - lo) /
                                   (hi - lo);
  return out;
}

RealVector ScalingTransform::apply(const RealVector& row) const {
  return apply(RealMatrix(row.transpose())).row(0);
}

RealVector ScalingTransform::invert(const RealVector& row) const {
  return invert(RealMatrix(row.transpose())).row(0);
}

std::pair<RealMatrix, ScalingTransform> minmax_scale(const RealMatrix& series, Real lo, Real hi) {
  if (hi <= lo) throw std::invalid_argument("minmax_scale: hi must exceed lo");
  ScalingTransform t;
  t.lo = lo;
  t.hi = hi;
  t.data_min = series.colwise().minCoeff();
  t.data_max = series.colwise().maxCoeff();
  for (Index j = 0; j < series.cols(); ++j)
    if (t.data_max(j) <= t.data_min(j))
      throw std::invalid_argument("minmax_scale: component " + std::to_string(j) +
                                  " has a degenerate range");
  return {t.apply(series), t};
}

RealMatrix add_gaussian_noise(const RealMatrix& series, Real sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("add_gaussian_noise: sigma must be nonnegative");
  if (sigma == 0.0) return series;
  Rng rng = make_rng(seed);
  RealMatrix out = series;
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j) out(i, j) += gaussian(rng, 0.0, sigma);
  return out;
}

}  // namespace hqrc
