#pragma once

#include "cflml/classify.hpp"
#include "cflml/common.hpp"
#include "cflml/dataset.hpp"
#include "cflml/group.hpp"
#include "cflml/linalg.hpp"
#include "cflml/neighborhood.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cflml {

/// Radical: each child is solved from the last accepted metric's weights.
/// Conservative: each instance contributes through its associated metric with the group weight.
enum class Strategy { Radical, Conservative };

/// Single: one closed-form solve from the identity, no evolution.
/// UpToThree: evolution capped at three metrics. Unbounded: evolution until the backtrace stop
/// (or an explicit max_metrics).
enum class Variant { Single, UpToThree, Unbounded };

struct EvolutionConfig {
  Strategy strategy = Strategy::Radical;
  std::optional<int> max_metrics;  ///< nullopt: no cap
  int backtrace_max = 5;
  int k = 3;
  FilterKind filter = FilterKind::Gaussian;
  CenterMode center = CenterMode::Weighted;
  double theta = kDefaultTheta;
  std::optional<Index> omega_capacity;  ///< nullopt: default_omega_capacity
  std::optional<Index> m_cap;
  double ridge = kDefaultRidge;
  std::uint64_t seed = 0;
  Exec exec = Exec::Parallel;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

struct StepRecord {
  int attempt = 0;
  double val_error = 0.0;  ///< NaN when the offspring solve failed
  bool accepted = false;
  std::string failure;
};

struct TrainReport {
  int accepted_metrics = 0;
  int attempts = 0;
  double initial_val_error = 0.0;
  std::vector<StepRecord> steps;
  double final_val_error = 0.0;  ///< NaN when no validation set was used
  double wall_time = 0.0;
  bool fallback_to_identity = false;
  std::string fallback_reason;

  /// Validation errors of the accepted steps, in order.
  std::vector<double> accepted_errors() const;
};

/// Standardized training instances plus a held-out validation set.
struct LearningProblem {
  TrainingSet train;
  RowMatrix val_x;
  std::vector<int> val_labels;
  int num_classes = 0;
};

struct EvolutionResult {
  MetricGroup group;
  TrainReport report;
};

/// Stochastic local search over metric groups starting from {identity}. A child joins the
/// group only if the multi-metric validation error strictly drops. The first child from a
/// parent uses every active instance; retries after a rejection draw a bootstrap resample
/// of the active set.
EvolutionResult evolve(const LearningProblem& problem, const EvolutionConfig& cfg);

/// One closed-form child of the identity metric. The result holds that child alone, or the
/// identity with report.fallback_to_identity set when the solve fails. Validation is optional.
EvolutionResult single_offspring(const LearningProblem& problem, const EvolutionConfig& cfg);

struct TrainedModel {
  Model model;
  TrainReport report;
};

/// Runs a variant on raw data. The standardizer is fit on `split.train`. Single trains on
/// all of `split.train`; the evolving variants train on the pure training part and validate
/// on `split.val`.
TrainedModel train_variant(Variant variant, const Dataset& data, const Split& split, EvolutionConfig cfg,
                           Scaling scaling = Scaling::ZScore);

}  // namespace cflml
