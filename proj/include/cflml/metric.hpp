#pragma once

#include "cflml/common.hpp"

namespace cflml {

/// Mahalanobis metric A = LᵀL held by its m×n factor L.
class Metric {
 public:
  Metric() = default;
  /// Throws std::invalid_argument unless 1 ≤ m ≤ n and all entries are finite.
  explicit Metric(Matrix factor);

  static Metric identity(Index n);

  const Matrix& factor() const { return l_; }
  Index rows() const { return l_.rows(); }
  Index dim() const { return l_.cols(); }

  Vector transform(const Vector& x) const;
  /// Every row of `x` mapped through L; the result has rows() columns.
  RowMatrix transform_rows(const RowMatrix& x) const;

  /// ‖L(x − y)‖².
  double dist_sq(const Vector& x, const Vector& y) const;

  /// A = LᵀL.
  Matrix gram() const { return l_.transpose() * l_; }

  Metric scaled(double c) const { return Metric(c * l_); }

  friend bool operator==(const Metric& a, const Metric& b) { return a.l_ == b.l_; }

 private:
  Matrix l_;
};

/// Squared Euclidean distance between rows of already-transformed matrices, summed in
/// coordinate order. Every neighbor search in the library goes through this.
inline double projected_dist_sq(const RowMatrix& a, Index i, const RowMatrix& b, Index j) {
  double s = 0.0;
  for (Index d = 0; d < a.cols(); ++d) {
    const double diff = a(i, d) - b(j, d);
    s += diff * diff;
  }
  return s;
}

}  // namespace cflml
