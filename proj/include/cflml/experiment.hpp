#pragma once

#include "cflml/baselines.hpp"
#include "cflml/dataset.hpp"
#include "cflml/evolution.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cflml {

enum class Method { Euclidean, Pca, Lda, Cflml1, Cflml3, Em };

std::string_view method_key(Method m);    ///< "euclidean", "cflml1", ...
std::string_view method_label(Method m);  ///< "Euclidean", "CFLML-1", ...
std::optional<Method> parse_method(std::string_view s);

struct BenchConfig {
  std::vector<Method> methods;
  int repeats = 10;
  int k = 3;
  std::map<Method, int> k_map;       ///< per-method k overrides
  std::optional<Index> pca_dim;      ///< PCA baseline target dimension
  std::optional<Index> reduce_dim;   ///< PCA preprocessing of the whole data set per repeat
  SplitSpec split;                   ///< split.seed is the base seed
  Scaling scaling = Scaling::ZScore;
  EvolutionConfig learning;          ///< k and seed are overridden per method / repeat

  int k_for(Method m) const;
};

struct MethodResult {
  Method method = Method::Euclidean;
  int k = 0;
  std::vector<double> errors;      ///< per repeat, fraction
  std::vector<double> wall_times;  ///< per repeat, seconds
  std::vector<int> metric_counts;  ///< per repeat
  double mean_pct = 0.0;
  double std_pct = 0.0;  ///< sample standard deviation, 0 for a single repeat
};

struct BenchReport {
  std::string dataset;
  int repeats = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<MethodResult> methods;
};

/// Seed of repeat r, derived from the base seed.
std::uint64_t repeat_seed(std::uint64_t base, int r);

/// Every method of a repeat is fit and scored on the same split.
BenchReport run_bench(const Dataset& data, const BenchConfig& cfg, std::string dataset_name = "data");

/// Mean and sample standard deviation in percent.
std::pair<double, double> mean_std_pct(const std::vector<double>& errors);

/// Table with one header row and one data row of "mean(std)" cells, two decimals.
std::string format_table(const BenchReport& report);

/// One line per repeat and method: repeat,seed,method,k,error_pct,metrics,wall_time_s.
std::string format_csv(const BenchReport& report);

}  // namespace cflml
