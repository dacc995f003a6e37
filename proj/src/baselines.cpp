#include "cflml/baselines.hpp"

#include <string>

namespace cflml {

PrincipalAxes principal_axes(const RowMatrix& x) {
  if (x.rows() == 0) throw std::invalid_argument("principal_axes: no rows");
  const Vector mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(x.rows());
  const SymEigen eig = sym_eig(SymMatrix(cov));
  return {eig.vectors.transpose(), eig.values, mean};
}

Metric fit_baseline(const BaselineSpec& spec, const RowMatrix& train, std::span<const int> labels) {
  const Index n = train.cols();
  if (spec.target_dim && (*spec.target_dim < 1 || *spec.target_dim > n)) {
    throw std::invalid_argument("fit_baseline: target_dim must be in [1, n]");
  }
  switch (spec.kind) {
    case BaselineKind::Euclidean:
      return Metric::identity(n);
    case BaselineKind::Pca: {
      const Index d = spec.target_dim.value_or(n);
      return Metric(principal_axes(train).directions.topRows(d));
    }
    case BaselineKind::Lda: {
      if (static_cast<Index>(labels.size()) != train.rows()) {
        throw std::invalid_argument("fit_baseline: label count mismatch");
      }
      int classes = 0;
      for (int y : labels) classes = std::max(classes, y + 1);
      if (classes < 2) throw std::invalid_argument("fit_baseline: LDA needs at least two classes");
      const Vector mean = train.colwise().mean().transpose();
      std::vector<Vector> class_mean(static_cast<std::size_t>(classes), Vector::Zero(n));
      std::vector<double> count(static_cast<std::size_t>(classes), 0.0);
      for (Index i = 0; i < train.rows(); ++i) {
        const auto y = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
        class_mean[y] += train.row(i).transpose();
        count[y] += 1.0;
      }
      Matrix between = Matrix::Zero(n, n);
      Index present = 0;
      for (std::size_t c = 0; c < class_mean.size(); ++c) {
        if (count[c] == 0.0) continue;
        ++present;
        class_mean[c] /= count[c];
        const Vector d = class_mean[c] - mean;
        between += count[c] * d * d.transpose();
      }
      Matrix within = Matrix::Zero(n, n);
      for (Index i = 0; i < train.rows(); ++i) {
        const Vector d = train.row(i).transpose() - class_mean[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        within += d * d.transpose();
      }
      const GenEigResult eig = gen_eig_sym_definite(SymMatrix(between), SymMatrix(within), spec.ridge);
      const Index d = std::min({spec.target_dim.value_or(n), present - 1, n});
      if (d < 1) throw NumericalError("fit_baseline: degenerate LDA scatter");
      return Metric(eig.eigenvectors.leftCols(d).transpose());
    }
  }
  throw std::invalid_argument("fit_baseline: unknown kind");
}

Dataset pca_reduce(const Dataset& data, std::span<const Index> train_idx, Index target_dim) {
  if (target_dim < 1 || target_dim > data.dim()) {
    throw std::invalid_argument("pca_reduce: target_dim " + std::to_string(target_dim) + " outside [1, " +
                                std::to_string(data.dim()) + "]");
  }
  if (train_idx.empty()) throw std::invalid_argument("pca_reduce: empty training index list");
  const PrincipalAxes axes = principal_axes(data.subset(train_idx).instances);
  const Matrix basis = axes.directions.topRows(target_dim);
  Dataset out;
  out.instances.resize(data.size(), target_dim);
  for (Index i = 0; i < data.size(); ++i) {
    out.instances.row(i) = (basis * (data.instances.row(i).transpose() - axes.mean)).transpose();
  }
  out.labels = data.labels;
  out.class_names = data.class_names;
  return out;
}

}  // namespace cflml
