#pragma once

#include "cflml/common.hpp"
#include "cflml/kernels.hpp"
#include "cflml/linalg.hpp"
#include "cflml/metric.hpp"
#include "cflml/neighborhood.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cflml {

/// Filter-weighted, mass-normalized scatter of offsets (center − x_j) over the different-class,
/// same-class and full candidate sets of one instance. An empty set gives a zero matrix.
struct InstanceScatter {
  Matrix diff;   ///< M̄_D
  Matrix same;   ///< M̄_S
  Matrix total;  ///< M̄_N
};

/// Offsets are taken in standardized input coordinates; weights come from `hood`, which
/// must have been computed over the same `omega`.
InstanceScatter scatter_for_instance(Index i, const TrainingSet& train, const OmegaCache& omega,
                                     const Neighborhood& hood);

/// B = Σ wᵢ (M̄_D − M̄_S) and C = Σ wᵢ M̄_N over active instances.
struct ScatterPair {
  SymMatrix between;
  SymMatrix total;
  Index active_count = 0;
  double weight_sum = 0.0;

  /// No active instance carried positive weight; no child can be solved.
  bool empty() const { return active_count == 0 || !(weight_sum > 0.0); }
};

/// Reference assembly from materialized per-instance scatters.
ScatterPair assemble(std::span<const InstanceScatter> scatters, std::span<const double> weights,
                     std::span<const char> active);

/// Fused assembly: per-instance scatters are computed on the fly from each instance's source
/// neighborhood and never stored.
ScatterPair assemble_scatter(const TrainingSet& train, const OmegaCache& omega,
                             std::span<const kernels::ScatterSource> sources, Exec exec = Exec::Parallel);

struct ChildOptions {
  std::optional<Index> m_cap;
  double ridge = kDefaultRidge;
  double positive_cutoff = kDefaultPositiveCutoff;
};

struct ChildResult {
  std::optional<Metric> metric;  ///< rows λ_k·y_kᵀ; empty on failure
  Vector eigenvalues;            ///< retained λ_k, descending
  Matrix directions;             ///< unscaled y_kᵀ as rows
  double shift = 0.0;            ///< regularization added to C
  std::string failure;
};

/// Closed-form child: maximizes Tr(L B Lᵀ) subject to L (C + εI) Lᵀ = I through the
/// generalized eigenproblem, keeps the positive spectrum and scales row k by λ_k.
ChildResult solve_child(const ScatterPair& scatter, const ChildOptions& options = {});

}  // namespace cflml
