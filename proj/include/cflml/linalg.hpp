#pragma once

#include "cflml/common.hpp"

namespace cflml {

inline constexpr double kDefaultRidge = 1e-8;
inline constexpr double kDefaultPositiveCutoff = 1e-10;

/// Dense symmetric matrix. Construction symmetrizes the input as (M + Mᵀ)/2.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix zero(Index order);

  Index order() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Index r, Index c) const { return m_(r, c); }

 private:
  Matrix m_;
};

struct SymEigen {
  Vector values;   ///< descending
  Matrix vectors;  ///< orthonormal columns, column k pairs with values[k]
};

/// Cyclic Jacobi eigendecomposition. Ties keep their original diagonal order, and each
/// eigenvector's first significant component is made positive.
SymEigen sym_eig(const SymMatrix& m);

struct GenEigResult {
  Vector eigenvalues;   ///< descending
  Matrix eigenvectors;  ///< column k is y_k; columns are orthonormal in the regularized right-hand matrix
  Index retained = 0;   ///< eigenvalues above the default positivity cutoff
  double shift = 0.0;   ///< ε added to the diagonal of the right-hand matrix
};

/// Solves B y = λ (C + εI) y with ε = ridge · trace(C) / n by Cholesky reduction to a standard
/// symmetric problem. Throws NumericalError if C has a materially negative eigenvalue or the
/// regularized matrix cannot be factored.
GenEigResult gen_eig_sym_definite(const SymMatrix& b, const SymMatrix& c, double ridge = kDefaultRidge);

/// Keeps eigenpairs with λ > rel_cutoff · max(1, |λ₁|).
GenEigResult positive_truncate(const GenEigResult& r, double rel_cutoff = kDefaultPositiveCutoff);

/// Lower Cholesky factor of an SPD matrix, or an empty matrix when a pivot is not positive.
Matrix cholesky_lower(const Matrix& a);

}  // namespace cflml
