#pragma once

// Data-parallel inner loops. Each kernel has a straightforward serial reference and an
// OpenMP version; results are independent of thread count. The reference versions back
// the equivalence tests and the kernel benchmark.

#include "cflml/common.hpp"
#include "cflml/neighborhood.hpp"

#include <span>
#include <vector>

namespace cflml::kernels {

/// Per-instance input to the scatter reduction. A null `hood` or zero weight skips the instance.
struct ScatterSource {
  const Neighborhood* hood = nullptr;
  double weight = 0.0;
};

struct ScatterSums {
  Matrix between;  ///< Σ wᵢ (M̄_D − M̄_S)
  Matrix total;    ///< Σ wᵢ M̄_N
  Index active_count = 0;
  double weight_sum = 0.0;
};

/// Instances per reduction block in the OpenMP scatter kernel.
inline constexpr Index kScatterBlock = 32;

namespace serial {

/// Row i: the `capacity` nearest other rows of `projected`, ascending (distance, index).
std::vector<Index> nearest_lists(const RowMatrix& projected, Index capacity);

/// Row q: the k nearest rows of `reference` to query row q, ascending (distance, index).
std::vector<Index> knn_lists(const RowMatrix& reference, const RowMatrix& queries, Index k);

std::vector<double> list_distances(const RowMatrix& projected, std::span<const Index> lists, Index capacity);

std::vector<InstanceStats> all_instance_stats(const TrainingSet& train, const OmegaCache& omega,
                                              std::span<const double> dist_sq, std::span<const double> sigma,
                                              FilterKind kind, CenterMode center);

ScatterSums scatter_sums(const TrainingSet& train, const OmegaCache& omega, std::span<const ScatterSource> sources);

}  // namespace serial

namespace omp {

std::vector<Index> nearest_lists(const RowMatrix& projected, Index capacity);
std::vector<Index> knn_lists(const RowMatrix& reference, const RowMatrix& queries, Index k);
std::vector<double> list_distances(const RowMatrix& projected, std::span<const Index> lists, Index capacity);
std::vector<InstanceStats> all_instance_stats(const TrainingSet& train, const OmegaCache& omega,
                                              std::span<const double> dist_sq, std::span<const double> sigma,
                                              FilterKind kind, CenterMode center);
/// Blocked reduction: fixed blocks of kScatterBlock instances, summed in block order.
ScatterSums scatter_sums(const TrainingSet& train, const OmegaCache& omega, std::span<const ScatterSource> sources);

}  // namespace omp

}  // namespace cflml::kernels
