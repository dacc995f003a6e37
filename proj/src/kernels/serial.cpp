#include "cflml/kernels.hpp"
#include "cflml/metric.hpp"
#include "cflml/offspring.hpp"

#include <algorithm>
#include <utility>

namespace cflml::kernels::serial {

namespace {

using Candidate = std::pair<double, Index>;

std::vector<Index> sorted_prefix(std::vector<Candidate>& all, Index count) {
  std::sort(all.begin(), all.end());
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index t = 0; t < count; ++t) out.push_back(all[static_cast<std::size_t>(t)].second);
  return out;
}

}  // namespace

std::vector<Index> nearest_lists(const RowMatrix& projected, Index capacity) {
  const Index n = projected.rows();
  std::vector<Index> flat;
  flat.reserve(static_cast<std::size_t>(n * capacity));
  for (Index i = 0; i < n; ++i) {
    std::vector<Candidate> all;
    for (Index j = 0; j < n; ++j) {
      if (j != i) all.emplace_back(projected_dist_sq(projected, i, projected, j), j);
    }
    const auto row = sorted_prefix(all, capacity);
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return flat;
}

std::vector<Index> knn_lists(const RowMatrix& reference, const RowMatrix& queries, Index k) {
  std::vector<Index> flat;
  flat.reserve(static_cast<std::size_t>(queries.rows() * k));
  for (Index q = 0; q < queries.rows(); ++q) {
    std::vector<Candidate> all;
    for (Index j = 0; j < reference.rows(); ++j) all.emplace_back(projected_dist_sq(queries, q, reference, j), j);
    const auto row = sorted_prefix(all, k);
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return flat;
}

std::vector<double> list_distances(const RowMatrix& projected, std::span<const Index> lists, Index capacity) {
  std::vector<double> out(lists.size());
  for (std::size_t t = 0; t < lists.size(); ++t) {
    const auto i = static_cast<Index>(t) / capacity;
    out[t] = projected_dist_sq(projected, i, projected, lists[t]);
  }
  return out;
}

std::vector<InstanceStats> all_instance_stats(const TrainingSet& train, const OmegaCache& omega,
                                              std::span<const double> dist_sq, std::span<const double> sigma,
                                              FilterKind kind, CenterMode center) {
  std::vector<InstanceStats> out;
  out.reserve(static_cast<std::size_t>(train.size()));
  for (Index i = 0; i < train.size(); ++i) {
    out.push_back(instance_stats(i, train, omega, dist_sq, sigma[static_cast<std::size_t>(i)], kind, center));
  }
  return out;
}

ScatterSums scatter_sums(const TrainingSet& train, const OmegaCache& omega, std::span<const ScatterSource> sources) {
  const Index n = train.dim();
  ScatterSums sums{Matrix::Zero(n, n), Matrix::Zero(n, n), 0, 0.0};
  for (Index i = 0; i < train.size(); ++i) {
    const auto& src = sources[static_cast<std::size_t>(i)];
    if (src.hood == nullptr || src.weight == 0.0) continue;
    const InstanceScatter s = scatter_for_instance(i, train, omega, *src.hood);
    sums.between += src.weight * (s.diff - s.same);
    sums.total += src.weight * s.total;
    ++sums.active_count;
    sums.weight_sum += src.weight;
  }
  return sums;
}

}  // namespace cflml::kernels::serial
