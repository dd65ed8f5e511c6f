#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace hqrc {

using Real = double;
using Complex = std::complex<Real>;

using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Kronecker product a ⊗ b as a dense matrix.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b)
    -> Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> {
  Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(
      a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Column-stacking vectorization vc(m); Eigen matrices are column-major, so
/// this is a reshape.
inline ComplexVector vectorize(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

/// Inverse of vectorize for square matrices.
inline ComplexMatrix unvectorize(const ComplexVector& v, Index dim) {
  return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

inline Real clamp01(Real x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace hqrc
