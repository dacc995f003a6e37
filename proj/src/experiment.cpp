#include "cflml/experiment.hpp"

#include "cflml/classify.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace cflml {

std::string_view method_key(Method m) {
  switch (m) {
    case Method::Euclidean:
      return "euclidean";
    case Method::Pca:
      return "pca";
    case Method::Lda:
      return "lda";
    case Method::Cflml1:
      return "cflml1";
    case Method::Cflml3:
      return "cflml3";
    case Method::Em:
      return "em";
  }
  return "?";
}

std::string_view method_label(Method m) {
  switch (m) {
    case Method::Euclidean:
      return "Euclidean";
    case Method::Pca:
      return "PCA";
    case Method::Lda:
      return "LDA";
    case Method::Cflml1:
      return "CFLML-1";
    case Method::Cflml3:
      return "CFLML-3";
    case Method::Em:
      return "EM-CFLML";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view s) {
  for (Method m : {Method::Euclidean, Method::Pca, Method::Lda, Method::Cflml1, Method::Cflml3, Method::Em}) {
    if (s == method_key(m)) return m;
  }
  return std::nullopt;
}

int BenchConfig::k_for(Method m) const {
  const auto it = k_map.find(m);
  return it == k_map.end() ? k : it->second;
}

std::uint64_t repeat_seed(std::uint64_t base, int r) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(r)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (std::uint64_t{words[0]} << 32) | words[1];
}

std::pair<double, double> mean_std_pct(const std::vector<double>& errors) {
  if (errors.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double e : errors) mean += e;
  mean /= static_cast<double>(errors.size());
  double ss = 0.0;
  for (double e : errors) ss += (e - mean) * (e - mean);
  const double sd = errors.size() > 1 ? std::sqrt(ss / static_cast<double>(errors.size() - 1)) : 0.0;
  return {100.0 * mean, 100.0 * sd};
}

namespace {

Model baseline_model(const Metric& metric, const TrainingSet& train, const Standardizer& standardizer,
                     const Dataset& data, int k) {
  Model model;
  model.group.append(metric, std::vector<double>(static_cast<std::size_t>(train.size()), 0.0));
  model.standardizer = standardizer;
  model.train = train;
  model.class_names = data.class_names;
  model.k = k;
  return model;
}

}  // namespace

BenchReport run_bench(const Dataset& data, const BenchConfig& cfg, std::string dataset_name) {
  if (cfg.repeats < 1) throw std::invalid_argument("bench: repeats must be >= 1");
  if (cfg.methods.empty()) throw std::invalid_argument("bench: no methods");

  BenchReport report;
  report.dataset = std::move(dataset_name);
  report.repeats = cfg.repeats;
  for (Method m : cfg.methods) report.methods.push_back({m, cfg.k_for(m), {}, {}, {}, 0.0, 0.0});

  for (int r = 0; r < cfg.repeats; ++r) {
    const std::uint64_t seed = repeat_seed(cfg.split.seed, r);
    report.seeds.push_back(seed);
    SplitSpec spec = cfg.split;
    spec.seed = seed;
    const Split sp = split(data, spec);
    const Dataset source = cfg.reduce_dim ? pca_reduce(data, sp.train, *cfg.reduce_dim) : data;

    const Standardizer standardizer = fit_standardizer(source, sp.train, cfg.scaling);
    const Dataset train_part = source.subset(sp.train);
    const TrainingSet train{standardizer.apply(train_part.instances), train_part.labels};
    const Dataset test = source.subset(sp.test);

    for (auto& result : report.methods) {
      const auto start = std::chrono::steady_clock::now();
      Model model;
      switch (result.method) {
        case Method::Euclidean:
        case Method::Pca:
        case Method::Lda: {
          BaselineSpec b;
          b.kind = result.method == Method::Euclidean ? BaselineKind::Euclidean
                   : result.method == Method::Pca     ? BaselineKind::Pca
                                                      : BaselineKind::Lda;
          if (result.method == Method::Pca) b.target_dim = cfg.pca_dim;
          b.ridge = cfg.learning.ridge;
          model = baseline_model(fit_baseline(b, train.x, train.labels), train, standardizer, source, result.k);
          break;
        }
        case Method::Cflml1:
        case Method::Cflml3:
        case Method::Em: {
          EvolutionConfig ec = cfg.learning;
          ec.k = result.k;
          ec.seed = seed;
          const Variant v = result.method == Method::Cflml1   ? Variant::Single
                            : result.method == Method::Cflml3 ? Variant::UpToThree
                                                              : Variant::Unbounded;
          model = train_variant(v, source, sp, ec, cfg.scaling).model;
          break;
        }
      }
      result.errors.push_back(evaluate(model, test, cfg.learning.exec));
      result.metric_counts.push_back(static_cast<int>(model.group.size()));
      result.wall_times.push_back(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
  }
  for (auto& result : report.methods) std::tie(result.mean_pct, result.std_pct) = mean_std_pct(result.errors);
  return report;
}

std::string format_table(const BenchReport& report) {
  constexpr int kCell = 14;
  std::ostringstream out;
  out << std::left << std::setw(kCell) << "Data Set";
  for (const auto& m : report.methods) out << std::setw(kCell) << method_label(m.method);
  out << "\n" << std::setw(kCell) << report.dataset;
  for (const auto& m : report.methods) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(2) << m.mean_pct << "(" << m.std_pct << ")";
    out << std::setw(kCell) << cell.str();
  }
  out << "\n" << std::setw(kCell) << "k";
  for (const auto& m : report.methods) out << std::setw(kCell) << m.k;
  out << "\n" << std::setw(kCell) << "repeats" << report.repeats << "\n";
  return out.str();
}

std::string format_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "repeat,seed,method,k,error_pct,metrics,wall_time_s\n";
  for (int r = 0; r < report.repeats; ++r) {
    for (const auto& m : report.methods) {
      const auto i = static_cast<std::size_t>(r);
      out << r << ',' << report.seeds[i] << ',' << method_key(m.method) << ',' << m.k << ',' << std::setprecision(17)
          << 100.0 * m.errors[i] << ',' << m.metric_counts[i] << ',' << std::setprecision(6) << m.wall_times[i]
          << "\n";
    }
  }
  return out.str();
}

}  // namespace cflml
