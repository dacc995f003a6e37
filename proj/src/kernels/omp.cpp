#include "cflml/kernels.hpp"
#include "cflml/metric.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace cflml::kernels::omp {

namespace {

using Candidate = std::pair<double, Index>;

void take_smallest(std::vector<Candidate>& buf, Index count, Index* out) {
  std::partial_sort(buf.begin(), buf.begin() + count, buf.end());
  for (Index t = 0; t < count; ++t) out[t] = buf[static_cast<std::size_t>(t)].second;
}

}  // namespace

std::vector<Index> nearest_lists(const RowMatrix& projected, Index capacity) {
  const Index n = projected.rows();
  std::vector<Index> flat(static_cast<std::size_t>(n * capacity));
#pragma omp parallel
  {
    std::vector<Candidate> buf;
    buf.reserve(static_cast<std::size_t>(n));
#pragma omp for schedule(dynamic, 16)
    for (Index i = 0; i < n; ++i) {
      buf.clear();
      for (Index j = 0; j < n; ++j) {
        if (j != i) buf.emplace_back(projected_dist_sq(projected, i, projected, j), j);
      }
      take_smallest(buf, capacity, flat.data() + i * capacity);
    }
  }
  return flat;
}

std::vector<Index> knn_lists(const RowMatrix& reference, const RowMatrix& queries, Index k) {
  const Index nq = queries.rows();
  std::vector<Index> flat(static_cast<std::size_t>(nq * k));
#pragma omp parallel
  {
    std::vector<Candidate> buf;
    buf.reserve(static_cast<std::size_t>(reference.rows()));
#pragma omp for schedule(dynamic, 16)
    for (Index q = 0; q < nq; ++q) {
      buf.clear();
      for (Index j = 0; j < reference.rows(); ++j) buf.emplace_back(projected_dist_sq(queries, q, reference, j), j);
      take_smallest(buf, k, flat.data() + q * k);
    }
  }
  return flat;
}

std::vector<double> list_distances(const RowMatrix& projected, std::span<const Index> lists, Index capacity) {
  const Index n = capacity == 0 ? 0 : static_cast<Index>(lists.size()) / capacity;
  std::vector<double> out(lists.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < capacity; ++t) {
      const auto at = static_cast<std::size_t>(i * capacity + t);
      out[at] = projected_dist_sq(projected, i, projected, lists[at]);
    }
  }
  return out;
}

std::vector<InstanceStats> all_instance_stats(const TrainingSet& train, const OmegaCache& omega,
                                              std::span<const double> dist_sq, std::span<const double> sigma,
                                              FilterKind kind, CenterMode center) {
  std::vector<InstanceStats> out(static_cast<std::size_t>(train.size()));
#pragma omp parallel for schedule(dynamic, 32)
  for (Index i = 0; i < train.size(); ++i) {
    out[static_cast<std::size_t>(i)] =
        instance_stats(i, train, omega, dist_sq, sigma[static_cast<std::size_t>(i)], kind, center);
  }
  return out;
}

ScatterSums scatter_sums(const TrainingSet& train, const OmegaCache& omega, std::span<const ScatterSource> sources) {
  const Index n = train.dim();
  const Index count = train.size();
  const Index blocks = (count + kScatterBlock - 1) / kScatterBlock;
  std::vector<ScatterSums> partial(static_cast<std::size_t>(blocks));

#pragma omp parallel
  {
    Matrix same_rows(omega.capacity, n);
    Matrix diff_rows(omega.capacity, n);
#pragma omp for schedule(dynamic, 1)
    for (Index b = 0; b < blocks; ++b) {
      ScatterSums acc{Matrix::Zero(n, n), Matrix::Zero(n, n), 0, 0.0};
      const Index end = std::min(count, (b + 1) * kScatterBlock);
      for (Index i = b * kScatterBlock; i < end; ++i) {
        const auto& src = sources[static_cast<std::size_t>(i)];
        if (src.hood == nullptr || src.weight == 0.0) continue;
        const auto& hood = *src.hood;
        const auto& st = hood.stats[static_cast<std::size_t>(i)];
        const auto members = omega.of(i);
        const auto dist = hood.distances_of(i);
        const int own = train.labels[static_cast<std::size_t>(i)];
        Index ns = 0;
        Index nd = 0;
        for (std::size_t t = 0; t < members.size(); ++t) {
          const Index j = members[t];
          const double root = std::sqrt(filter_weight(hood.filter, dist[t], hood.sigma[static_cast<std::size_t>(i)]));
          if (train.labels[static_cast<std::size_t>(j)] == own) {
            same_rows.row(ns++) = root * (st.center - train.x.row(j).transpose()).transpose();
          } else {
            diff_rows.row(nd++) = root * (st.center - train.x.row(j).transpose()).transpose();
          }
        }
        const Matrix s_acc = same_rows.topRows(ns).transpose() * same_rows.topRows(ns);
        const Matrix d_acc = diff_rows.topRows(nd).transpose() * diff_rows.topRows(nd);
        if (st.p_diff > 0.0) acc.between.noalias() += (src.weight / st.p_diff) * d_acc;
        if (st.p_same > 0.0) acc.between.noalias() -= (src.weight / st.p_same) * s_acc;
        if (st.p_total > 0.0) acc.total.noalias() += (src.weight / st.p_total) * (s_acc + d_acc);
        ++acc.active_count;
        acc.weight_sum += src.weight;
      }
      partial[static_cast<std::size_t>(b)] = std::move(acc);
    }
  }

  ScatterSums sums{Matrix::Zero(n, n), Matrix::Zero(n, n), 0, 0.0};
  for (const auto& p : partial) {
    sums.between += p.between;
    sums.total += p.total;
    sums.active_count += p.active_count;
    sums.weight_sum += p.weight_sum;
  }
  return sums;
}

}  // namespace cflml::kernels::omp
