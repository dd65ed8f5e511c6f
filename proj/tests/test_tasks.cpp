#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hqrc/tasks.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace hqrc;

TEST_CASE("narma_series") {
  NarmaParams p;
  p.order = 10;

  // Zero history: y1 = delta
  RealVector raw = RealVector::Zero(5);
  const NarmaSeries quiet = narma_series(p, raw);
  CHECK(quiet.targets(0) == doctest::Approx(0.1));

  // All-zero input settles into a bounded band near the scalar fixed point
  RealVector zeros = RealVector::Zero(800);
  const NarmaSeries settled = narma_series(p, zeros);
  Real y = 0.0;
  std::vector<Real> history(10, 0.0);
  for (int k = 0; k < 800; ++k) {
    Real sum = 0.0;
    for (Real h : history) sum += h;
    const Real y_next = p.kappa * y + p.eta * y * sum + p.delta;
    history.insert(history.begin(), y);
    history.pop_back();
    y = y_next;
  }
  CHECK(settled.targets(799) == doctest::Approx(y).epsilon(1e-12));
  CHECK(settled.targets.tail(100).maxCoeff() < 1.0);

  // Input scaling to [0, 0.2]
  Rng rng = make_rng(1);
  RealVector random_raw(2000);
  for (int i = 0; i < 2000; ++i) random_raw(i) = uniform(rng, 0.0, 1.0);
  const NarmaSeries series = narma_series(p, random_raw);
  CHECK(series.inputs.minCoeff() >= 0.0);
  CHECK(series.inputs.maxCoeff() <= 0.2);
  CHECK(series.targets.allFinite());

  // Determinism per seed
  const NarmaSeries again = narma_series(p, random_raw);
  CHECK((series.targets - again.targets).cwiseAbs().maxCoeff() == 0.0);

  // NARMA divergence guard trips on inputs far outside the stable range
  NarmaParams unstable = p;
  unstable.input_hi = 4.0;
  CHECK_THROWS_AS(narma_series(unstable, RealVector::Ones(600)), std::runtime_error);
}

TEST_CASE("delay_target") {
  RealVector u(3);
  u << 1.0, 2.0, 3.0;
  CHECK((delay_target(u, 0) - u).cwiseAbs().maxCoeff() == 0.0);

  const RealVector d1 = delay_target(u, 1);
  CHECK(d1(1) == 1.0);
  CHECK(d1(2) == 2.0);

  CHECK_THROWS_AS(delay_target(u, 3), std::invalid_argument);
  CHECK_THROWS_AS(delay_target(u, -1), std::invalid_argument);
}

TEST_CASE("lorenz_rk4") {
  LorenzParams p;

  const RealMatrix fixed = lorenz_rk4(RealVector::Zero(3), 10, p);
  CHECK(fixed.cwiseAbs().maxCoeff() == 0.0);

  // One step against the independent implementation
  RealVector x0(3);
  x0 << 1.0, 1.0, 1.0;
  const RealMatrix traj = lorenz_rk4(x0, 1, p);
  const RealVector expected = oracle::lorenz_step(x0, p.a, p.b, p.c, p.dt);
  CHECK((traj.row(1).transpose() - expected).cwiseAbs().maxCoeff() < 1e-12);

  // Fourth-order convergence: error vs a fine reference shrinks ~16x when dt
  // halves
  LorenzParams fine = p;
  fine.dt = 1e-4;
  const RealVector ref = lorenz_rk4(x0, 10000, fine).row(10000);

  auto error_at = [&](Real dt) {
    LorenzParams q = p;
    q.dt = dt;
    const int steps = int(std::round(1.0 / dt));
    return (lorenz_rk4(x0, steps, q).row(steps).transpose() - ref).norm();
  };
  const Real e_coarse = error_at(0.02);
  const Real e_mid = error_at(0.01);
  const Real e_fine = error_at(0.005);
  CHECK(e_coarse / e_mid > 8.0);
  CHECK(e_mid / e_fine > 8.0);
}

TEST_CASE("kse_etdrk4") {
  KseParams p;
  p.grid = 32;
  p.domain_length = 22.0;

  // The zero field is a fixed point
  const RealMatrix still = kse_etdrk4(RealVector::Zero(32), 20, p);
  CHECK(still.cwiseAbs().maxCoeff() < 1e-14);

  // The spatial mean is conserved
  RealVector u0(32);
  for (int i = 0; i < 32; ++i)
    u0(i) = std::cos(2.0 * std::numbers::pi * i / 32.0) + 0.3;
  const RealMatrix traj = kse_etdrk4(u0, 100, p);
  for (int k = 0; k <= 100; k += 20)
    CHECK(traj.row(k).mean() == doctest::Approx(u0.mean()).epsilon(1e-8));

  CHECK_THROWS_AS(kse_etdrk4(RealVector::Zero(7), 1, p), std::invalid_argument);
}

TEST_CASE("kse_etdrk4 matches the fine-step spectral RK4 oracle") {
  KseParams p;
  p.grid = 32;
  p.domain_length = 22.0;
  p.dt = 0.25;

  RealVector u0(p.grid);
  for (int i = 0; i < p.grid; ++i) {
    const Real x = p.domain_length * i / p.grid;
    u0(i) = std::cos(2.0 * std::numbers::pi * x / p.domain_length);
  }

  const RealMatrix traj = kse_etdrk4(u0, 4, p);  // t = 1.0
  const oracle::KseSpectralRk4 reference(p.grid, p.domain_length);
  const RealVector expected = reference.integrate(u0, 1.0, 1e-4);
  CHECK((traj.row(4).transpose() - expected).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("kse trajectories keep positive per-component std after transients") {
  KseParams p;  // paper grid
  const RealVector u0 = kse_random_field(p, 11);
  const RealMatrix traj = kse_etdrk4(u0, 600, p);
  const RealMatrix tail = traj.bottomRows(200);
  for (Index j = 0; j < tail.cols(); ++j) {
    const RealVector col = tail.col(j);
    const Real sd = std::sqrt((col.array() - col.mean()).square().sum() / Real(col.size()));
    CHECK(sd > 0.0);
  }
}

TEST_CASE("minmax_scale") {
  RealMatrix series(4, 2);
  series << 0.0, 10.0, 1.0, 20.0, 2.0, 30.0, 4.0, 50.0;
  const auto [scaled, transform] = minmax_scale(series, 0.0, 1.0);
  CHECK(scaled.minCoeff() == doctest::Approx(0.0));
  CHECK(scaled.maxCoeff() == doctest::Approx(1.0));

  const RealMatrix back = transform.invert(scaled);
  CHECK((back - series).cwiseAbs().maxCoeff() < 1e-12);

  // Reuse on out-of-range test data keeps the affine map
  RealMatrix test(1, 2);
  test << 8.0, 90.0;
  const RealMatrix test_scaled = transform.apply(test);
  CHECK(test_scaled(0, 0) == doctest::Approx(2.0));
  CHECK((transform.invert(test_scaled) - test).cwiseAbs().maxCoeff() < 1e-12);

  RealMatrix degenerate(3, 1);
  degenerate << 5.0, 5.0, 5.0;
  CHECK_THROWS_AS(minmax_scale(degenerate, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("add_gaussian_noise") {
  RealMatrix series = RealMatrix::Constant(10, 2, 0.5);
  CHECK((add_gaussian_noise(series, 0.0, 1) - series).cwiseAbs().maxCoeff() == 0.0);

  const RealMatrix a = add_gaussian_noise(series, 1e-3, 42);
  const RealMatrix b = add_gaussian_noise(series, 1e-3, 42);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - series).cwiseAbs().maxCoeff() > 0.0);

  // Law-of-large-numbers bound on the sample mean of the added noise
  const Real sigma = 0.01;
  const RealMatrix big = add_gaussian_noise(RealMatrix::Zero(1000, 1000), sigma, 7);
  CHECK(std::abs(big.mean()) < 5.0 * sigma / 1000.0);
}
