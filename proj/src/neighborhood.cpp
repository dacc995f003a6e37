#include "cflml/neighborhood.hpp"

#include "cflml/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cflml {

Index default_omega_capacity(Index n_train, int k) {
  return std::max<Index>(0, std::min<Index>(n_train - 1, std::max<Index>(50, 5 * Index{k})));
}

OmegaCache build_omega(const RowMatrix& train, const Metric& metric, Index capacity, Exec exec) {
  if (capacity < 1) throw std::invalid_argument("build_omega: capacity must be >= 1");
  if (train.rows() < 2) throw std::invalid_argument("build_omega: need at least two instances");
  const RowMatrix projected = metric.transform_rows(train);
  OmegaCache cache;
  cache.capacity = std::min(capacity, train.rows() - 1);
  cache.flat = exec == Exec::Serial ? kernels::serial::nearest_lists(projected, cache.capacity)
                                    : kernels::omp::nearest_lists(projected, cache.capacity);
  return cache;
}

double filter_weight(FilterKind kind, double dist_sq, double sigma) {
  const double r = dist_sq / (sigma * sigma);
  switch (kind) {
    case FilterKind::Gaussian:
      return std::exp(-0.5 * r);
    case FilterKind::Butterworth:
      return 1.0 / (1.0 + r * r);
  }
  return 0.0;
}

std::vector<double> Neighborhood::ambiguity() const {
  std::vector<double> w(stats.size());
  std::transform(stats.begin(), stats.end(), w.begin(), [](const InstanceStats& s) { return s.w; });
  return w;
}

std::vector<double> omega_distances(const TrainingSet& train, const OmegaCache& omega, const Metric& metric,
                                    Exec exec) {
  const RowMatrix projected = metric.transform_rows(train.x);
  return exec == Exec::Serial ? kernels::serial::list_distances(projected, omega.flat, omega.capacity)
                              : kernels::omp::list_distances(projected, omega.flat, omega.capacity);
}

std::optional<double> raw_neighbor_radius(Index i, int k, const OmegaCache& omega, std::span<const double> dist_sq,
                                          std::span<const int> labels) {
  if (k < 1) throw std::invalid_argument("neighbor radius: k must be >= 1");
  const auto members = omega.of(i);
  const auto row = dist_sq.subspan(static_cast<std::size_t>(i * omega.capacity), members.size());
  const int own = labels[static_cast<std::size_t>(i)];
  std::vector<double> same;
  for (std::size_t t = 0; t < members.size(); ++t) {
    if (labels[static_cast<std::size_t>(members[t])] == own) same.push_back(row[t]);
  }
  if (same.empty()) return std::nullopt;
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), same.size());
  std::partial_sort(same.begin(), same.begin() + static_cast<std::ptrdiff_t>(take), same.end());
  double sum = 0.0;
  for (std::size_t t = 0; t < take; ++t) sum += std::sqrt(same[t]);
  return sum / static_cast<double>(take);
}

std::vector<double> neighbor_radii(int k, const OmegaCache& omega, std::span<const double> dist_sq,
                                   std::span<const int> labels) {
  const Index n = omega.size();
  std::vector<std::optional<double>> raw(static_cast<std::size_t>(n));
  std::vector<double> defined;
  for (Index i = 0; i < n; ++i) {
    raw[static_cast<std::size_t>(i)] = raw_neighbor_radius(i, k, omega, dist_sq, labels);
    if (raw[static_cast<std::size_t>(i)]) defined.push_back(*raw[static_cast<std::size_t>(i)]);
  }

  double fallback = 1.0;
  double floor = 1e-8;
  if (!defined.empty()) {
    const double mean = std::accumulate(defined.begin(), defined.end(), 0.0) / static_cast<double>(defined.size());
    if (mean > 0.0) floor = 1e-8 * mean;
    std::vector<double> sorted = defined;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    fallback = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  }

  std::vector<double> sigma(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = std::max(raw[i].value_or(fallback), floor);
  return sigma;
}

InstanceStats instance_stats(Index i, const TrainingSet& train, const OmegaCache& omega,
                             std::span<const double> dist_sq, double sigma, FilterKind kind, CenterMode center) {
  const auto members = omega.of(i);
  const auto row = dist_sq.subspan(static_cast<std::size_t>(i * omega.capacity), members.size());
  const int own = train.labels[static_cast<std::size_t>(i)];

  InstanceStats s;
  s.sigma = sigma;
  Vector weighted = Vector::Zero(train.dim());
  bool any_same = false;
  for (std::size_t t = 0; t < members.size(); ++t) {
    const Index j = members[t];
    const double p = filter_weight(kind, row[t], sigma);
    if (train.labels[static_cast<std::size_t>(j)] == own) {
      s.p_same += p;
      any_same = true;
      if (center == CenterMode::Weighted) weighted += p * train.x.row(j).transpose();
    } else {
      s.p_diff += p;
    }
  }
  s.p_total = s.p_same + s.p_diff;
  s.w = s.p_total > 0.0 ? s.p_diff / s.p_total : 0.0;
  if (center == CenterMode::Weighted && any_same && s.p_same > 0.0) {
    s.center = weighted / s.p_same;
  } else {
    s.center = train.x.row(i).transpose();
  }
  return s;
}

Neighborhood compute_neighborhood(const TrainingSet& train, const OmegaCache& omega, const Metric& metric, int k,
                                  FilterKind kind, CenterMode center, Exec exec) {
  Neighborhood hood;
  hood.capacity = omega.capacity;
  hood.filter = kind;
  hood.dist_sq = omega_distances(train, omega, metric, exec);
  hood.sigma = neighbor_radii(k, omega, hood.dist_sq, train.labels);
  hood.stats = exec == Exec::Serial
                   ? kernels::serial::all_instance_stats(train, omega, hood.dist_sq, hood.sigma, kind, center)
                   : kernels::omp::all_instance_stats(train, omega, hood.dist_sq, hood.sigma, kind, center);
  return hood;
}

}  // namespace cflml
