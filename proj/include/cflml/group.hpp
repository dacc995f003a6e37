#pragma once

#include "cflml/common.hpp"
#include "cflml/metric.hpp"
#include "cflml/neighborhood.hpp"

#include <span>
#include <vector>

namespace cflml {

inline constexpr double kDefaultTheta = 0.1;

/// Ordered metrics (index 0 is the initial metric) with each training instance linked to
/// the metric under which it is least ambiguous.
class MetricGroup {
 public:
  explicit MetricGroup(double theta = kDefaultTheta) : theta_(theta) {}

  /// Restores a group from stored state; per-metric ambiguities are not retained.
  static MetricGroup restore(std::vector<Metric> metrics, std::vector<int> association, std::vector<double> group_w,
                             double theta);

  /// Adds a metric with its per-instance ambiguities. group_w becomes the elementwise
  /// minimum; association moves to the new metric only on a strict improvement.
  void append(Metric metric, std::vector<double> ambiguity);

  const std::vector<Metric>& metrics() const { return metrics_; }
  const std::vector<int>& association() const { return association_; }
  const std::vector<double>& group_w() const { return group_w_; }
  const std::vector<std::vector<double>>& metric_w() const { return metric_w_; }
  double theta() const { return theta_; }
  Index size() const { return static_cast<Index>(metrics_.size()); }

 private:
  std::vector<Metric> metrics_;
  std::vector<int> association_;
  std::vector<double> group_w_;
  std::vector<std::vector<double>> metric_w_;
  double theta_ = kDefaultTheta;
};

/// Rebuilds association and group ambiguity from fresh per-metric neighborhood stats.
MetricGroup recompute_association(const MetricGroup& group, const TrainingSet& train, const OmegaCache& omega, int k,
                                  FilterKind filter, CenterMode center, Exec exec = Exec::Parallel);

/// Instance i is active iff group_w[i] > theta.
std::vector<char> active_set(const MetricGroup& group);

}  // namespace cflml
