#include "cflml/evolution.hpp"

#include "cflml/kernels.hpp"
#include "cflml/offspring.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

namespace cflml {

void EvolutionConfig::validate() const {
  if (backtrace_max < 1) throw std::invalid_argument("backtrace_max must be >= 1");
  if (max_metrics && *max_metrics < 1) throw std::invalid_argument("max_metrics must be >= 1");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must be in [0, 1]");
  if (omega_capacity && *omega_capacity < 1) throw std::invalid_argument("omega capacity must be >= 1");
  if (m_cap && *m_cap < 1) throw std::invalid_argument("m_cap must be >= 1");
  if (!(ridge >= 0.0)) throw std::invalid_argument("ridge must be >= 0");
}

std::vector<double> TrainReport::accepted_errors() const {
  std::vector<double> out;
  for (const auto& s : steps) {
    if (s.accepted) out.push_back(s.val_error);
  }
  return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_problem(const LearningProblem& p, const EvolutionConfig& cfg, bool need_val) {
  cfg.validate();
  if (p.train.size() < 2) throw std::invalid_argument("training set needs at least two instances");
  if (static_cast<Index>(p.train.labels.size()) != p.train.size()) {
    throw std::invalid_argument("training labels and instances differ in length");
  }
  if (cfg.k > p.train.size()) throw std::invalid_argument("k exceeds the training set size");
  if (need_val && p.val_x.rows() == 0) throw std::invalid_argument("validation set is empty");
  if (p.val_x.rows() > 0 && p.val_x.cols() != p.train.dim()) {
    throw std::invalid_argument("validation dimension differs from training dimension");
  }
}

OmegaCache initial_omega(const LearningProblem& p, const EvolutionConfig& cfg) {
  const Index capacity = cfg.omega_capacity.value_or(default_omega_capacity(p.train.size(), cfg.k));
  return build_omega(p.train.x, Metric::identity(p.train.dim()), capacity, cfg.exec);
}

ChildResult try_solve(const TrainingSet& train, const OmegaCache& omega,
                      const std::vector<kernels::ScatterSource>& sources, const EvolutionConfig& cfg) {
  ChildOptions opts;
  opts.m_cap = cfg.m_cap;
  opts.ridge = cfg.ridge;
  try {
    return solve_child(assemble_scatter(train, omega, sources, cfg.exec), opts);
  } catch (const NumericalError& e) {
    ChildResult failed;
    failed.failure = e.what();
    return failed;
  }
}

// Validation state: the neighbor lists of every validation query under every group metric.
class ValidationCache {
 public:
  ValidationCache(const LearningProblem& p, const EvolutionConfig& cfg) : p_(p), cfg_(cfg) {}

  std::vector<Index> lists_for(const Metric& m) const {
    const RowMatrix ref = m.transform_rows(p_.train.x);
    const RowMatrix q = m.transform_rows(p_.val_x);
    return cfg_.exec == Exec::Serial ? kernels::serial::knn_lists(ref, q, cfg_.k)
                                     : kernels::omp::knn_lists(ref, q, cfg_.k);
  }

  double error(const std::vector<std::vector<Index>>& lists, std::span<const int> association) const {
    const Index queries = p_.val_x.rows();
    const auto k = static_cast<std::size_t>(cfg_.k);
    std::vector<std::span<const Index>> per_metric(lists.size());
    std::size_t wrong = 0;
    for (Index q = 0; q < queries; ++q) {
      for (std::size_t t = 0; t < lists.size(); ++t) {
        per_metric[t] = std::span<const Index>(lists[t]).subspan(static_cast<std::size_t>(q) * k, k);
      }
      const Index chosen = select_from_neighbors(per_metric, association);
      const Prediction pred = vote(per_metric[static_cast<std::size_t>(chosen)], p_.train.labels, p_.num_classes);
      if (pred.label != p_.val_labels[static_cast<std::size_t>(q)]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(queries);
  }

 private:
  const LearningProblem& p_;
  const EvolutionConfig& cfg_;
};

std::vector<kernels::ScatterSource> scatter_sources(const MetricGroup& group,
                                                     const std::vector<Neighborhood>& hoods, std::size_t parent,
                                                     Strategy strategy) {
  const auto active = active_set(group);
  std::vector<kernels::ScatterSource> sources(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (!active[i]) continue;
    if (strategy == Strategy::Radical) {
      sources[i] = {&hoods[parent], hoods[parent].stats[i].w};
    } else {
      const auto a = static_cast<std::size_t>(group.association()[i]);
      sources[i] = {&hoods[a], group.group_w()[i]};
    }
  }
  return sources;
}

// Multiplies each active source's weight by its multiplicity in a bootstrap resample of the
// active instances.
void bootstrap(std::vector<kernels::ScatterSource>& sources, std::mt19937_64& rng) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].hood != nullptr) active.push_back(i);
  }
  if (active.empty()) return;
  std::vector<int> count(sources.size(), 0);
  std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
  for (std::size_t d = 0; d < active.size(); ++d) ++count[active[pick(rng)]];
  for (std::size_t i : active) {
    sources[i].weight *= count[i];
    if (count[i] == 0) sources[i].hood = nullptr;
  }
}

}  // namespace

EvolutionResult evolve(const LearningProblem& problem, const EvolutionConfig& cfg) {
  check_problem(problem, cfg, true);
  const auto start = Clock::now();
  const TrainingSet& train = problem.train;
  const OmegaCache omega = initial_omega(problem, cfg);
  const ValidationCache validation(problem, cfg);

  EvolutionResult out{MetricGroup(cfg.theta), {}};
  MetricGroup& group = out.group;
  TrainReport& report = out.report;

  std::vector<Neighborhood> hoods;
  std::vector<std::vector<Index>> val_lists;
  const Metric identity = Metric::identity(train.dim());
  hoods.push_back(compute_neighborhood(train, omega, identity, cfg.k, cfg.filter, cfg.center, cfg.exec));
  group.append(identity, hoods.back().ambiguity());
  val_lists.push_back(validation.lists_for(identity));
  double best = validation.error(val_lists, group.association());
  report.initial_val_error = best;

  std::mt19937_64 rng(cfg.seed);
  std::size_t parent = 0;
  int backtrace = 0;
  int retries_from_parent = 0;
  while (backtrace < cfg.backtrace_max && (!cfg.max_metrics || group.size() < *cfg.max_metrics)) {
    StepRecord step;
    step.attempt = ++report.attempts;
    step.val_error = kNaN;

    auto sources = scatter_sources(group, hoods, parent, cfg.strategy);
    if (retries_from_parent > 0) bootstrap(sources, rng);
    ChildResult child = try_solve(train, omega, sources, cfg);

    if (!child.metric) {
      step.failure = child.failure;
    } else {
      Neighborhood child_hood =
          compute_neighborhood(train, omega, *child.metric, cfg.k, cfg.filter, cfg.center, cfg.exec);
      MetricGroup candidate = group;
      candidate.append(*child.metric, child_hood.ambiguity());
      auto lists = val_lists;
      lists.push_back(validation.lists_for(*child.metric));
      step.val_error = validation.error(lists, candidate.association());
      if (step.val_error < best) {
        step.accepted = true;
        best = step.val_error;
        group = std::move(candidate);
        hoods.push_back(std::move(child_hood));
        val_lists = std::move(lists);
        parent = hoods.size() - 1;
        ++report.accepted_metrics;
      }
    }

    if (step.accepted) {
      backtrace = 0;
      retries_from_parent = 0;
    } else {
      ++backtrace;
      ++retries_from_parent;
    }
    report.steps.push_back(std::move(step));
  }

  report.final_val_error = best;
  report.wall_time = seconds_since(start);
  return out;
}

EvolutionResult single_offspring(const LearningProblem& problem, const EvolutionConfig& cfg) {
  check_problem(problem, cfg, false);
  const auto start = Clock::now();
  const TrainingSet& train = problem.train;
  const OmegaCache omega = initial_omega(problem, cfg);
  const Metric identity = Metric::identity(train.dim());
  const Neighborhood hood = compute_neighborhood(train, omega, identity, cfg.k, cfg.filter, cfg.center, cfg.exec);

  MetricGroup parent(cfg.theta);
  parent.append(identity, hood.ambiguity());
  const std::vector<Neighborhood> hoods{hood};
  const ChildResult child = try_solve(train, omega, scatter_sources(parent, hoods, 0, Strategy::Radical), cfg);

  EvolutionResult out{MetricGroup(cfg.theta), {}};
  out.report.attempts = 1;
  StepRecord step;
  step.attempt = 1;
  step.val_error = kNaN;
  if (child.metric) {
    out.group.append(*child.metric,
                     compute_neighborhood(train, omega, *child.metric, cfg.k, cfg.filter, cfg.center, cfg.exec)
                         .ambiguity());
    out.report.accepted_metrics = 1;
    step.accepted = true;
  } else {
    out.group = parent;
    out.report.fallback_to_identity = true;
    out.report.fallback_reason = child.failure;
    step.failure = child.failure;
  }

  out.report.initial_val_error = kNaN;
  out.report.final_val_error = kNaN;
  if (problem.val_x.rows() > 0) {
    const ValidationCache validation(problem, cfg);
    const std::vector<std::vector<Index>> base{validation.lists_for(identity)};
    out.report.initial_val_error = validation.error(base, parent.association());
    const std::vector<std::vector<Index>> lists{validation.lists_for(out.group.metrics().front())};
    out.report.final_val_error = validation.error(lists, out.group.association());
    step.val_error = out.report.final_val_error;
  }
  out.report.steps.push_back(std::move(step));
  out.report.wall_time = seconds_since(start);
  return out;
}

TrainedModel train_variant(Variant variant, const Dataset& data, const Split& split, EvolutionConfig cfg,
                           Scaling scaling) {
  if (split.train.empty()) throw std::invalid_argument("train_variant: empty training split");
  const Standardizer standardizer = fit_standardizer(data, split.train, scaling);

  auto as_training = [&](const std::vector<Index>& idx) {
    const Dataset part = data.subset(idx);
    return TrainingSet{standardizer.apply(part.instances), part.labels};
  };

  LearningProblem problem;
  problem.num_classes = data.num_classes();
  EvolutionResult result{MetricGroup(cfg.theta), {}};
  if (variant == Variant::Single) {
    problem.train = as_training(split.train);
    cfg.max_metrics = 1;
    result = single_offspring(problem, cfg);
  } else {
    problem.train = as_training(split.pure_train());
    const TrainingSet val = as_training(split.val);
    problem.val_x = val.x;
    problem.val_labels = val.labels;
    if (variant == Variant::UpToThree) cfg.max_metrics = 3;
    result = evolve(problem, cfg);
  }

  TrainedModel out;
  out.model.group = std::move(result.group);
  out.model.standardizer = standardizer;
  out.model.train = std::move(problem.train);
  out.model.class_names = data.class_names;
  out.model.k = cfg.k;
  out.model.filter = cfg.filter;
  out.model.center = cfg.center;
  out.report = std::move(result.report);
  return out;
}

}  // namespace cflml
