#pragma once

#include "cflml/common.hpp"
#include "cflml/dataset.hpp"
#include "cflml/linalg.hpp"
#include "cflml/metric.hpp"

#include <optional>
#include <span>

namespace cflml {

enum class BaselineKind { Euclidean, Pca, Lda };

struct BaselineSpec {
  BaselineKind kind = BaselineKind::Euclidean;
  std::optional<Index> target_dim;  ///< PCA default n, LDA default C − 1
  double ridge = kDefaultRidge;
};

/// Euclidean: identity. PCA: top principal directions as unit rows. LDA: Fisher directions
/// from the between-class vs within-class generalized eigenproblem, rows unscaled.
Metric fit_baseline(const BaselineSpec& spec, const RowMatrix& train, std::span<const int> labels);

/// Principal directions (rows, descending variance) and their variances.
struct PrincipalAxes {
  Matrix directions;
  Vector variances;
  Vector mean;
};

PrincipalAxes principal_axes(const RowMatrix& x);

/// Projects every instance onto the top `target_dim` principal directions fitted on the
/// `train_idx` rows.
Dataset pca_reduce(const Dataset& data, std::span<const Index> train_idx, Index target_dim);

}  // namespace cflml
