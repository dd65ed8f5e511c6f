#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hqrc/learning.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace hqrc;

TEST_CASE("assemble_design") {
  RealMatrix z(1, 1);
  z << 0.5;
  const RealMatrix x = assemble_design(z);
  CHECK(x.rows() == 1);
  CHECK(x.cols() == 2);
  CHECK(x(0, 0) == 1.0);
  CHECK(x(0, 1) == 0.5);

  RealMatrix z2 = RealMatrix::Random(7, 4);
  const RealMatrix x2 = assemble_design(z2);
  CHECK(x2.cols() == 5);
  CHECK(x2.col(0).minCoeff() == 1.0);
  CHECK_THROWS_AS(assemble_design(RealMatrix(0, 3)), std::invalid_argument);
}

TEST_CASE("ridge_fit recovers exact linear targets") {
  Rng rng = make_rng(1);
  RealMatrix z(40, 3);
  for (Index i = 0; i < z.size(); ++i) z(i / 3, i % 3) = uniform(rng, -1.0, 1.0);
  const RealMatrix x = assemble_design(z);
  RealVector w_true(4);
  w_true << 0.3, -1.0, 2.0, 0.5;
  const RealVector y = x * w_true;

  const ReadoutModel model = ridge_fit(x, y, 0.0);
  CHECK((model.weights.col(0) - w_true).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((x * model.weights - y).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ridge_fit shrinks to zero as beta grows") {
  Rng rng = make_rng(2);
  RealMatrix x(30, 4);
  RealVector y(30);
  for (Index i = 0; i < 30; ++i) {
    for (Index j = 0; j < 4; ++j) x(i, j) = uniform(rng, -1.0, 1.0);
    y(i) = uniform(rng, -1.0, 1.0);
  }
  const ReadoutModel model = ridge_fit(x, y, 1e12);
  CHECK(model.weights.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ridge_fit matches the explicit Gram-inverse oracle") {
  Rng rng = make_rng(3);
  RealMatrix x(50, 6);
  RealMatrix y(50, 2);
  for (Index i = 0; i < 50; ++i) {
    for (Index j = 0; j < 6; ++j) x(i, j) = uniform(rng, -1.0, 1.0);
    y(i, 0) = uniform(rng, -1.0, 1.0);
    y(i, 1) = uniform(rng, -1.0, 1.0);
  }
  const Real beta = 1e-3;
  const ReadoutModel model = ridge_fit(x, y, beta);
  const RealMatrix expected = oracle::ridge_gram_inverse(x, y, beta);
  CHECK((model.weights - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("ridge_fit rejects singular systems at beta=0") {
  RealMatrix x(4, 3);
  // Duplicate columns make the Gram matrix exactly singular
  x << 1, 2, 2, 1, 3, 3, 1, 5, 5, 1, 7, 7;
  RealVector y(4);
  y << 1, 2, 3, 4;
  CHECK_THROWS_AS(ridge_fit(x, y, 0.0), std::runtime_error);
  CHECK_NOTHROW(ridge_fit(x, y, 1e-6));
}

TEST_CASE("ridge_fit is the minimizer of the regularized loss") {
  Rng rng = make_rng(4);
  RealMatrix x(25, 3);
  RealVector y(25);
  for (Index i = 0; i < 25; ++i) {
    for (Index j = 0; j < 3; ++j) x(i, j) = uniform(rng, -1.0, 1.0);
    y(i) = uniform(rng, -1.0, 1.0);
  }
  const Real beta = 0.1;
  const ReadoutModel model = ridge_fit(x, y, beta);
  auto loss = [&](const RealVector& w) {
    return (x * w - y).squaredNorm() + beta * w.squaredNorm();
  };
  const Real base = loss(model.weights.col(0));
  for (Index j = 0; j < 3; ++j)
    for (Real delta : {-1e-3, 1e-3}) {
      RealVector w = model.weights.col(0);
      w(j) += delta;
      CHECK(loss(w) >= base);
    }
}

TEST_CASE("predict") {
  ReadoutModel zero;
  zero.weights = RealMatrix::Zero(4, 1);
  CHECK(predict(zero, RealVector::Constant(3, 0.7))(0) == 0.0);

  ReadoutModel bias_only;
  bias_only.weights = RealMatrix::Zero(4, 2);
  bias_only.weights(0, 0) = 1.5;
  bias_only.weights(0, 1) = -2.0;
  const RealVector out = predict(bias_only, RealVector::Constant(3, 0.2));
  CHECK(out(0) == 1.5);
  CHECK(out(1) == -2.0);

  CHECK_THROWS_AS(predict(bias_only, RealVector::Zero(5)), std::invalid_argument);

  // predict_all agrees with row-wise predict
  Rng rng = make_rng(5);
  ReadoutModel m;
  m.weights = RealMatrix(4, 2);
  for (Index i = 0; i < m.weights.size(); ++i) m.weights(i / 2, i % 2) = uniform(rng, -1, 1);
  RealMatrix z(6, 3);
  for (Index i = 0; i < z.size(); ++i) z(i / 3, i % 3) = uniform(rng, 0, 1);
  const RealMatrix all = predict_all(m, z);
  for (Index r = 0; r < 6; ++r)
    CHECK((all.row(r).transpose() - predict(m, RealVector(z.row(r)))).cwiseAbs().maxCoeff() <
          1e-14);
}

TEST_CASE("nmse") {
  RealVector y(3), t(3);
  y << 1, 2, 3;
  t << 1, 2, 3;
  CHECK(nmse(y, t) == 0.0);

  CHECK(nmse(RealVector::Zero(3), t) == doctest::Approx(1.0));
  CHECK_THROWS_AS(nmse(t, RealVector::Zero(3)), std::invalid_argument);

  // Invariant under identical reordering
  RealVector y2(3), t2(3);
  y2 << 3, 1, 2;
  t2 << 3, 2, 1;
  RealVector y2r(3), t2r(3);
  y2r << 1, 2, 3;
  t2r << 2, 1, 3;
  CHECK(nmse(y2, t2) == doctest::Approx(nmse(y2r, t2r)));
}

TEST_CASE("nrmse_series") {
  RealMatrix pred(4, 2), target(4, 2);
  pred.setConstant(0.5);
  target.setConstant(0.5);
  RealVector sigma = RealVector::Constant(2, 0.1);
  CHECK(nrmse_series(pred, target, sigma).cwiseAbs().maxCoeff() == 0.0);

  // Constant offset equal to sigma in every component gives NRMSE 1
  RealMatrix off = target;
  off.array() += 0.1;
  const RealVector errors = nrmse_series(off, target, sigma);
  for (Index t = 0; t < errors.size(); ++t) CHECK(errors(t) == doctest::Approx(1.0));

  RealVector bad_sigma = RealVector::Zero(2);
  CHECK_THROWS_AS(nrmse_series(pred, target, bad_sigma), std::invalid_argument);
}

TEST_CASE("trajectory_rmse") {
  RealVector a(4), b(4);
  a << 1, 2, 3, 4;
  b = a;
  CHECK(trajectory_rmse(a, b) == 0.0);
  b.array() += 0.5;
  CHECK(trajectory_rmse(a, b) == doctest::Approx(0.5));
  CHECK_THROWS_AS(trajectory_rmse(RealVector(0), RealVector(0)), std::invalid_argument);

  // Two-pass loop oracle
  Rng rng = make_rng(6);
  RealVector x(9), y(9);
  for (int i = 0; i < 9; ++i) {
    x(i) = uniform(rng, -1, 1);
    y(i) = uniform(rng, -1, 1);
  }
  Real acc = 0.0;
  for (int i = 0; i < 9; ++i) acc += (x(i) - y(i)) * (x(i) - y(i));
  CHECK(trajectory_rmse(x, y) == doctest::Approx(std::sqrt(acc / 9.0)));
}

TEST_CASE("esn_init") {
  const EsnModel model = esn_init(60, 1, 0.9, 8, 1e-3, 7);
  Eigen::EigenSolver<RealMatrix> es(model.w_hh, false);
  CHECK(es.eigenvalues().cwiseAbs().maxCoeff() == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(model.w_hi.cwiseAbs().maxCoeff() <= 1.0);

  const EsnModel again = esn_init(60, 1, 0.9, 8, 1e-3, 7);
  CHECK((model.w_hh - again.w_hh).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(esn_init(20, 1, 1.2, 4, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(esn_init(20, 1, 0.9, 25, 0.0, 1), std::invalid_argument);
}

TEST_CASE("esn_step") {
  EsnModel zero;
  zero.d_h = 4;
  zero.d_o = 1;
  zero.w_hi = RealMatrix::Zero(4, 1);
  zero.w_hh = RealMatrix::Zero(4, 4);
  const RealVector h = esn_step(zero, RealVector::Constant(4, 0.3), RealVector::Constant(1, 0.7));
  CHECK(h.cwiseAbs().maxCoeff() == 0.0);

  const EsnModel model = esn_init(40, 1, 0.8, 6, 0.0, 9);
  RealVector state = RealVector::Zero(40);
  Rng rng = make_rng(8);
  for (int t = 0; t < 30; ++t) {
    state = esn_step(model, state, RealVector::Constant(1, uniform(rng, 0.0, 1.0)));
    CHECK(state.cwiseAbs().maxCoeff() < 1.0);
  }

  // Contraction with radius < 1 and zero input
  for (int t = 0; t < 400; ++t) state = esn_step(model, state, RealVector::Zero(1));
  CHECK(state.norm() < 1e-6);
}
