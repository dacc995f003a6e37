#include "cflml/classify.hpp"

#include "cflml/kernels.hpp"

#include <algorithm>
#include <string>

namespace cflml {

void Model::validate() const {
  if (group.size() < 1) throw std::invalid_argument("model: no metrics");
  if (static_cast<Index>(group.association().size()) != train.size()) {
    throw std::invalid_argument("model: association length differs from training instance count");
  }
  if (static_cast<Index>(train.labels.size()) != train.size()) {
    throw std::invalid_argument("model: label count differs from training instance count");
  }
  for (const auto& m : group.metrics()) {
    if (m.dim() != train.dim()) throw std::invalid_argument("model: metric dimension mismatch");
  }
  if (standardizer.dim() != train.dim()) throw std::invalid_argument("model: standardizer dimension mismatch");
  for (int y : train.labels) {
    if (y < 0 || y >= num_classes()) throw std::invalid_argument("model: label id out of range");
  }
  if (k < 1 || k > train.size()) throw std::invalid_argument("model: k out of range");
}

std::vector<Index> knn_query(const Metric& metric, const Vector& query, const RowMatrix& train, Index k) {
  if (k < 1 || k > train.rows()) {
    throw std::invalid_argument("knn_query: k=" + std::to_string(k) + " exceeds " + std::to_string(train.rows()) +
                                " training instances");
  }
  if (query.size() != metric.dim()) throw std::invalid_argument("knn_query: dimension mismatch");
  RowMatrix q(1, query.size());
  q.row(0) = query.transpose();
  return kernels::serial::knn_lists(metric.transform_rows(train), metric.transform_rows(q), k);
}

Index select_from_neighbors(std::span<const std::span<const Index>> per_metric, std::span<const int> association) {
  if (per_metric.size() <= 1) return 0;
  Index best = 0;
  Index best_count = -1;
  for (std::size_t t = 0; t < per_metric.size(); ++t) {
    const auto count = static_cast<Index>(std::count_if(per_metric[t].begin(), per_metric[t].end(), [&](Index j) {
      return association[static_cast<std::size_t>(j)] == static_cast<int>(t);
    }));
    if (count > best_count) {
      best_count = count;
      best = static_cast<Index>(t);
    }
  }
  return best;
}

Prediction vote(std::span<const Index> neighbors, std::span<const int> labels, int num_classes) {
  Prediction p;
  p.neighbor_ids.assign(neighbors.begin(), neighbors.end());
  p.vote_counts.assign(static_cast<std::size_t>(num_classes), 0);
  for (Index j : neighbors) ++p.vote_counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])];
  const int top = *std::max_element(p.vote_counts.begin(), p.vote_counts.end());
  for (Index j : neighbors) {
    const int y = labels[static_cast<std::size_t>(j)];
    if (p.vote_counts[static_cast<std::size_t>(y)] == top) {
      p.label = y;
      break;
    }
  }
  return p;
}

Classifier::Classifier(std::vector<Metric> metrics, std::vector<int> association, TrainingSet train, int k,
                       int num_classes)
    : metrics_(std::move(metrics)),
      association_(std::move(association)),
      train_(std::move(train)),
      k_(k),
      num_classes_(num_classes) {
  if (metrics_.empty()) throw std::invalid_argument("Classifier: no metrics");
  if (k_ < 1 || k_ > train_.size()) throw std::invalid_argument("Classifier: k out of range");
  if (static_cast<Index>(association_.size()) != train_.size()) {
    throw std::invalid_argument("Classifier: association length mismatch");
  }
  projected_.reserve(metrics_.size());
  for (const auto& m : metrics_) projected_.push_back(m.transform_rows(train_.x));
}

Classifier::Classifier(const Model& model)
    : Classifier(model.group.metrics(), model.group.association(), model.train, model.k, model.num_classes()) {}

std::vector<Index> Classifier::neighbor_lists(Index t, const RowMatrix& z, Exec exec) const {
  const RowMatrix q = metrics_[static_cast<std::size_t>(t)].transform_rows(z);
  const auto& ref = projected_[static_cast<std::size_t>(t)];
  return exec == Exec::Serial ? kernels::serial::knn_lists(ref, q, k_) : kernels::omp::knn_lists(ref, q, k_);
}

std::vector<Prediction> Classifier::decide(std::span<const std::vector<Index>> lists, Index queries) const {
  std::vector<Prediction> out(static_cast<std::size_t>(queries));
  std::vector<std::span<const Index>> per_metric(lists.size());
  for (Index q = 0; q < queries; ++q) {
    for (std::size_t t = 0; t < lists.size(); ++t) {
      per_metric[t] = std::span<const Index>(lists[t]).subspan(static_cast<std::size_t>(q * k_),
                                                               static_cast<std::size_t>(k_));
    }
    const Index chosen = select_from_neighbors(per_metric, association_);
    Prediction p = vote(per_metric[static_cast<std::size_t>(chosen)], train_.labels, num_classes_);
    p.chosen_metric = chosen;
    out[static_cast<std::size_t>(q)] = std::move(p);
  }
  return out;
}

std::vector<Prediction> Classifier::predict_batch(const RowMatrix& z, Exec exec) const {
  if (z.cols() != train_.dim()) throw std::invalid_argument("Classifier: query dimension mismatch");
  std::vector<std::vector<Index>> lists;
  for (Index t = 0; t < num_metrics(); ++t) lists.push_back(neighbor_lists(t, z, exec));
  return decide(lists, z.rows());
}

Prediction Classifier::predict(const Vector& z) const {
  RowMatrix q(1, z.size());
  q.row(0) = z.transpose();
  return predict_batch(q, Exec::Serial).front();
}

Index Classifier::select_metric(const Vector& z) const { return predict(z).chosen_metric; }

Index select_metric(const Model& model, const Vector& z) { return Classifier(model).select_metric(z); }

Prediction predict(const Model& model, const Vector& raw) {
  if (raw.size() != model.train.dim()) throw std::invalid_argument("predict: dimension mismatch");
  return Classifier(model).predict(model.standardizer.apply(raw));
}

double error_rate(std::span<const Prediction> predictions, std::span<const int> labels) {
  if (predictions.empty()) throw std::invalid_argument("error_rate: empty prediction set");
  if (predictions.size() != labels.size()) throw std::invalid_argument("error_rate: length mismatch");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) wrong += predictions[i].label != labels[i] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

double evaluate(const Model& model, const Dataset& test, Exec exec) {
  if (test.size() == 0) throw std::invalid_argument("evaluate: empty test set");
  if (test.dim() != model.train.dim()) {
    throw std::invalid_argument("evaluate: test set has " + std::to_string(test.dim()) + " features, model expects " +
                                std::to_string(model.train.dim()));
  }
  const Classifier clf(model);
  const auto preds = clf.predict_batch(model.standardizer.apply(test.instances), exec);
  return error_rate(preds, test.labels);
}

}  // namespace cflml
