#pragma once

#include "cflml/common.hpp"
#include "cflml/metric.hpp"

#include <optional>
#include <span>
#include <vector>

namespace cflml {

/// Standardized training instances with their class ids.
struct TrainingSet {
  RowMatrix x;
  std::vector<int> labels;

  Index size() const { return x.rows(); }
  Index dim() const { return x.cols(); }
};

enum class FilterKind { Gaussian, Butterworth };

/// Where the within-class "center" of an instance sits: the filter-weighted mean of its
/// same-class candidates, or the instance itself.
enum class CenterMode { Weighted, Self };

/// Candidate neighbor lists Ω_i, built once and reused under every later metric.
/// Row i holds the `capacity` nearest other instances, ascending by distance under the
/// construction metric, distance ties to the smaller index.
struct OmegaCache {
  Index capacity = 0;
  std::vector<Index> flat;

  Index size() const { return capacity == 0 ? 0 : static_cast<Index>(flat.size()) / capacity; }
  std::span<const Index> of(Index i) const {
    return {flat.data() + i * capacity, static_cast<std::size_t>(capacity)};
  }
};

/// min(N − 1, max(50, 5k)).
Index default_omega_capacity(Index n_train, int k);

/// Capacities above N − 1 are clamped to N − 1.
OmegaCache build_omega(const RowMatrix& train, const Metric& metric, Index capacity, Exec exec = Exec::Parallel);

/// Gaussian exp(−d²/2σ²) or Butterworth 1/(1 + (d/σ)⁴), with d² = dist_sq.
double filter_weight(FilterKind kind, double dist_sq, double sigma);

struct InstanceStats {
  double sigma = 0.0;
  double p_same = 0.0;
  double p_diff = 0.0;
  double p_total = 0.0;
  double w = 0.0;  ///< ambiguity p_diff / p_total, 0 when p_total is 0
  Vector center;
};

/// Everything derived from one metric over a fixed Ω: squared metric distances along
/// each Ω_i, radii, and per-instance stats.
struct Neighborhood {
  Index capacity = 0;
  FilterKind filter = FilterKind::Gaussian;
  std::vector<double> dist_sq;  ///< parallel to OmegaCache::flat
  std::vector<double> sigma;
  std::vector<InstanceStats> stats;

  std::span<const double> distances_of(Index i) const {
    return {dist_sq.data() + i * capacity, static_cast<std::size_t>(capacity)};
  }
  std::vector<double> ambiguity() const;
};

/// Squared distances along every Ω_i under `metric`.
std::vector<double> omega_distances(const TrainingSet& train, const OmegaCache& omega, const Metric& metric,
                                    Exec exec = Exec::Parallel);

/// Mean metric distance to the min(k, available) nearest same-class members of Ω_i, or
/// nullopt when Ω_i holds no same-class instance.
std::optional<double> raw_neighbor_radius(Index i, int k, const OmegaCache& omega, std::span<const double> dist_sq,
                                          std::span<const int> labels);

/// Radii for every instance. Instances without a same-class candidate take the median of
/// the defined radii; all radii are floored at 1e-8 × mean defined radius.
std::vector<double> neighbor_radii(int k, const OmegaCache& omega, std::span<const double> dist_sq,
                                   std::span<const int> labels);

InstanceStats instance_stats(Index i, const TrainingSet& train, const OmegaCache& omega,
                             std::span<const double> dist_sq, double sigma, FilterKind kind, CenterMode center);

Neighborhood compute_neighborhood(const TrainingSet& train, const OmegaCache& omega, const Metric& metric, int k,
                                  FilterKind kind, CenterMode center, Exec exec = Exec::Parallel);

}  // namespace cflml
