#include "cflml/group.hpp"

#include <string>

namespace cflml {

MetricGroup MetricGroup::restore(std::vector<Metric> metrics, std::vector<int> association,
                                 std::vector<double> group_w, double theta) {
  if (metrics.empty()) throw std::invalid_argument("MetricGroup: at least one metric required");
  if (!group_w.empty() && group_w.size() != association.size()) {
    throw std::invalid_argument("MetricGroup: association and ambiguity lengths differ");
  }
  for (int a : association) {
    if (a < 0 || a >= static_cast<int>(metrics.size())) {
      throw std::invalid_argument("MetricGroup: association references metric " + std::to_string(a));
    }
  }
  MetricGroup g(theta);
  g.metrics_ = std::move(metrics);
  g.association_ = std::move(association);
  g.group_w_ = std::move(group_w);
  return g;
}

void MetricGroup::append(Metric metric, std::vector<double> ambiguity) {
  if (!metrics_.empty()) {
    if (metric.dim() != metrics_.front().dim()) throw std::invalid_argument("MetricGroup: metric dimension mismatch");
    if (ambiguity.size() != group_w_.size()) throw std::invalid_argument("MetricGroup: ambiguity length mismatch");
  }
  const int id = static_cast<int>(metrics_.size());
  if (metrics_.empty()) {
    association_.assign(ambiguity.size(), 0);
    group_w_ = ambiguity;
  } else {
    for (std::size_t i = 0; i < ambiguity.size(); ++i) {
      if (ambiguity[i] < group_w_[i]) {
        group_w_[i] = ambiguity[i];
        association_[i] = id;
      }
    }
  }
  metrics_.push_back(std::move(metric));
  metric_w_.push_back(std::move(ambiguity));
}

MetricGroup recompute_association(const MetricGroup& group, const TrainingSet& train, const OmegaCache& omega, int k,
                                  FilterKind filter, CenterMode center, Exec exec) {
  MetricGroup out(group.theta());
  for (const Metric& m : group.metrics()) {
    out.append(m, compute_neighborhood(train, omega, m, k, filter, center, exec).ambiguity());
  }
  return out;
}

std::vector<char> active_set(const MetricGroup& group) {
  std::vector<char> mask(group.group_w().size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = group.group_w()[i] > group.theta() ? 1 : 0;
  return mask;
}

}  // namespace cflml
