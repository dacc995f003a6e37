#include "cflml/metric.hpp"

#include <string>

namespace cflml {

Metric::Metric(Matrix factor) : l_(std::move(factor)) {
  if (l_.rows() < 1 || l_.rows() > l_.cols()) {
    throw std::invalid_argument("Metric: factor must have 1 <= m <= n rows, got " + std::to_string(l_.rows()) +
                                "x" + std::to_string(l_.cols()));
  }
  if (!l_.allFinite()) throw std::invalid_argument("Metric: non-finite factor entries");
}

Metric Metric::identity(Index n) { return Metric(Matrix::Identity(n, n)); }

Vector Metric::transform(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("Metric::transform: dimension mismatch");
  return l_ * x;
}

RowMatrix Metric::transform_rows(const RowMatrix& x) const {
  if (x.cols() != dim()) throw std::invalid_argument("Metric::transform_rows: dimension mismatch");
  RowMatrix out(x.rows(), rows());
  for (Index r = 0; r < x.rows(); ++r) out.row(r) = (l_ * x.row(r).transpose()).transpose();
  return out;
}

double Metric::dist_sq(const Vector& x, const Vector& y) const {
  if (x.size() != dim() || y.size() != dim()) throw std::invalid_argument("Metric::dist_sq: dimension mismatch");
  return (l_ * (x - y)).squaredNorm();
}

}  // namespace cflml
