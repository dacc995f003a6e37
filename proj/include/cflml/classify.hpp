#pragma once

#include "cflml/common.hpp"
#include "cflml/dataset.hpp"
#include "cflml/group.hpp"
#include "cflml/metric.hpp"
#include "cflml/neighborhood.hpp"

#include <span>
#include <string>
#include <vector>

namespace cflml {

struct Prediction {
  int label = -1;
  Index chosen_metric = 0;
  std::vector<Index> neighbor_ids;  ///< ascending distance under the chosen metric
  std::vector<int> vote_counts;     ///< per class
};

/// Instance-based multi-metric classifier. Training instances are stored standardized.
struct Model {
  MetricGroup group;
  Standardizer standardizer;
  TrainingSet train;
  std::vector<std::string> class_names;
  int k = 3;
  FilterKind filter = FilterKind::Gaussian;
  CenterMode center = CenterMode::Weighted;

  int num_classes() const { return static_cast<int>(class_names.size()); }
  /// Throws std::invalid_argument when association, labels and metrics disagree.
  void validate() const;
};

/// The k nearest rows of `train` to `query` under `metric`, ties to the smaller index.
std::vector<Index> knn_query(const Metric& metric, const Vector& query, const RowMatrix& train, Index k);

/// Metric choice from per-metric neighbor lists: the metric t whose own list holds the most
/// instances associated to t; ties to the smaller index. One list means metric 0.
Index select_from_neighbors(std::span<const std::span<const Index>> per_metric, std::span<const int> association);

/// Majority vote over `neighbors` (ascending distance). Tied classes resolve to the class of
/// the nearest neighbor among them.
Prediction vote(std::span<const Index> neighbors, std::span<const int> labels, int num_classes);

/// Multi-metric kNN over standardized queries with per-metric projections of the training set.
class Classifier {
 public:
  Classifier(std::vector<Metric> metrics, std::vector<int> association, TrainingSet train, int k, int num_classes);
  explicit Classifier(const Model& model);

  Index select_metric(const Vector& z) const;
  Prediction predict(const Vector& z) const;
  std::vector<Prediction> predict_batch(const RowMatrix& z, Exec exec = Exec::Parallel) const;

  /// Neighbor lists of every query under metric t, flattened query-major.
  std::vector<Index> neighbor_lists(Index t, const RowMatrix& z, Exec exec = Exec::Parallel) const;

  /// Decide every query from per-metric lists produced by neighbor_lists.
  std::vector<Prediction> decide(std::span<const std::vector<Index>> lists, Index queries) const;

  Index num_metrics() const { return static_cast<Index>(metrics_.size()); }
  int k() const { return k_; }

 private:
  std::vector<Metric> metrics_;
  std::vector<int> association_;
  TrainingSet train_;
  std::vector<RowMatrix> projected_;
  int k_;
  int num_classes_;
};

/// Metric index chosen for a standardized query.
Index select_metric(const Model& model, const Vector& z);

/// Standardizes `raw`, then classifies it.
Prediction predict(const Model& model, const Vector& raw);

/// Fraction of wrong predictions.
double error_rate(std::span<const Prediction> predictions, std::span<const int> labels);

/// Error rate on raw instances whose labels already use the model's class ids. A label of
/// -1 (class unseen in training) always counts as an error.
double evaluate(const Model& model, const Dataset& test, Exec exec = Exec::Parallel);

}  // namespace cflml
