#include "cflml/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cflml {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string(what) + ": non-finite entries");
}

void fix_sign(Eigen::Ref<Vector> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 0.5 * peak) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SymMatrix: matrix is not square");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(Index order) { return SymMatrix(Matrix::Zero(order, order)); }

namespace {

template <class T>
using MatrixOf = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
T off_diagonal_sq(const MatrixOf<T>& a) {
  T s = 0;
  for (Index c = 0; c < a.cols(); ++c) {
    for (Index r = 0; r < a.rows(); ++r) {
      if (r != c) s += a(r, c) * a(r, c);
    }
  }
  return s;
}

template <class T>
struct Decomposition {
  MatrixOf<T> values;   ///< diagonal after the sweeps converge
  MatrixOf<T> vectors;  ///< accumulated rotations, column k pairs with values(k, k)
};

// Cyclic Jacobi; converged when the off-diagonal mass is below eps² of the total.
template <class T>
Decomposition<T> jacobi(MatrixOf<T> a) {
  const Index n = a.rows();
  MatrixOf<T> v = MatrixOf<T>::Identity(n, n);
  const T eps = std::numeric_limits<T>::epsilon();
  const T tol = eps * eps * a.squaredNorm();
  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_diagonal_sq(a) <= tol) break;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const T apq = a(p, q);
        if (apq == T(0)) continue;
        const T theta = (a(q, q) - a(p, p)) / (T(2) * apq);
        const T t = (theta >= 0 ? T(1) : T(-1)) / (std::abs(theta) + std::hypot(theta, T(1)));
        const T c = T(1) / std::sqrt(t * t + T(1));
        const T s = t * c;
        for (Index k = 0; k < n; ++k) {
          const T akp = a(k, p);
          const T akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const T apk = a(p, k);
          const T aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = T(0);
        a(q, p) = T(0);
        for (Index k = 0; k < n; ++k) {
          const T vkp = v(k, p);
          const T vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return {std::move(a), std::move(v)};
}

// Descending order, stable on ties; sign fixed so the largest-magnitude entry leads positive.
template <class T>
void sort_pairs(const Decomposition<T>& d, Vector& values, MatrixOf<T>& vectors) {
  const Index n = d.values.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return d.values(x, x) > d.values(y, y); });
  values.resize(n);
  vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    values[k] = static_cast<double>(d.values(src, src));
    vectors.col(k) = d.vectors.col(src);
  }
}

template <class T>
MatrixOf<T> cholesky_of(const MatrixOf<T>& a) {
  const Index n = a.rows();
  MatrixOf<T> l = MatrixOf<T>::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    T d = a(j, j);
    for (Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > T(0))) return {};
    const T ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      T s = a(i, j);
      for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

}  // namespace

SymEigen sym_eig(const SymMatrix& m) {
  require_finite(m.matrix(), "sym_eig");
  SymEigen out;
  sort_pairs(jacobi<double>(m.matrix()), out.values, out.vectors);
  for (Index k = 0; k < out.vectors.cols(); ++k) fix_sign(out.vectors.col(k));
  return out;
}

Matrix cholesky_lower(const Matrix& a) { return cholesky_of<double>(a); }

GenEigResult gen_eig_sym_definite(const SymMatrix& b, const SymMatrix& c, double ridge) {
  if (b.order() != c.order()) throw std::invalid_argument("gen_eig_sym_definite: order mismatch");
  if (ridge < 0.0) throw std::invalid_argument("gen_eig_sym_definite: negative ridge");
  require_finite(b.matrix(), "gen_eig_sym_definite");
  require_finite(c.matrix(), "gen_eig_sym_definite");
  const Index n = b.order();
  if (n == 0) return {};

  const double c_norm = c.matrix().norm();
  const double c_min = sym_eig(c).values[n - 1];
  if (c_min < -1e-8 * c_norm) {
    throw NumericalError("gen_eig_sym_definite: right-hand matrix has a negative eigenvalue " +
                         std::to_string(c_min));
  }

  const double shift = ridge * c.matrix().trace() / static_cast<double>(n);
  Matrix c_reg = c.matrix();
  c_reg.diagonal().array() += shift;

  // Reduction, decomposition and back-substitution run in long double: with a nearly
  // singular C the reduced matrix is scaled by 1/shift and double rounding there
  // swamps the residual of the small eigenpairs.
  using Long = long double;
  const MatrixOf<Long> c_long = c_reg.cast<Long>();
  const MatrixOf<Long> l = cholesky_of<Long>(c_long);
  if (l.size() == 0) throw NumericalError("gen_eig_sym_definite: factorization failed after regularization");

  // A = L⁻¹ B L⁻ᵀ
  const auto lower = l.triangularView<Eigen::Lower>();
  const MatrixOf<Long> t = lower.solve(b.matrix().cast<Long>());
  MatrixOf<Long> reduced = lower.solve(t.transpose());
  reduced = (reduced + reduced.transpose()) / Long(2);

  GenEigResult out;
  out.shift = shift;
  MatrixOf<Long> u;
  sort_pairs(jacobi<Long>(reduced), out.eigenvalues, u);
  MatrixOf<Long> y = l.transpose().triangularView<Eigen::Upper>().solve(u);

  // One Cholesky-QR pass in the C_reg inner product.
  const MatrixOf<Long> gram = y.transpose() * c_long * y;
  const MatrixOf<Long> r = cholesky_of<Long>((gram + gram.transpose()) / Long(2));
  if (r.size() != 0) y = r.triangularView<Eigen::Lower>().solve(y.transpose()).transpose();

  out.eigenvectors = y.cast<double>();
  for (Index k = 0; k < n; ++k) fix_sign(out.eigenvectors.col(k));
  const double cutoff = kDefaultPositiveCutoff * std::max(1.0, std::abs(out.eigenvalues[0]));
  out.retained = (out.eigenvalues.array() > cutoff).count();
  return out;
}

GenEigResult positive_truncate(const GenEigResult& r, double rel_cutoff) {
  GenEigResult out;
  out.shift = r.shift;
  if (r.eigenvalues.size() == 0) return out;
  const double cutoff = rel_cutoff * std::max(1.0, std::abs(r.eigenvalues[0]));
  Index keep = 0;
  while (keep < r.eigenvalues.size() && r.eigenvalues[keep] > cutoff) ++keep;
  out.eigenvalues = r.eigenvalues.head(keep);
  out.eigenvectors = r.eigenvectors.leftCols(keep);
  out.retained = keep;
  return out;
}

}  // namespace cflml
