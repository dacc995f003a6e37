#include "cflml/cli.hpp"

#include "cflml/classify.hpp"
#include "cflml/dataset.hpp"
#include "cflml/evolution.hpp"
#include "cflml/experiment.hpp"
#include "cflml/model_io.hpp"
#include "cflml/names.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace cflml {

namespace {

struct DataFlags {
  std::string path;
  std::string header = "auto";
  Index label_col = -1;

  CsvOptions csv() const {
    CsvOptions o;
    o.header = header == "yes" ? HeaderMode::Present : header == "no" ? HeaderMode::Absent : HeaderMode::Auto;
    o.label_column = label_col;
    return o;
  }
};

struct LearnFlags {
  int k = 3;
  std::string filter = "gaussian";
  std::string center = "weighted";
  std::string strategy = "radical";
  std::optional<int> max_metrics;
  int backtrace = 5;
  double theta = kDefaultTheta;
  std::optional<Index> omega;
  std::optional<Index> mcap;
  double ridge = kDefaultRidge;
  std::uint64_t seed = 0;
  bool serial = false;
  bool no_stratify = false;
  std::string scaling = "zscore";

  Scaling scaling_mode() const { return scaling == "none" ? Scaling::None : Scaling::ZScore; }

  EvolutionConfig config() const {
    EvolutionConfig c;
    c.k = k;
    c.filter = *parse_filter(filter);
    c.center = *parse_center(center);
    c.strategy = *parse_strategy(strategy);
    c.max_metrics = max_metrics;
    c.backtrace_max = backtrace;
    c.theta = theta;
    c.omega_capacity = omega;
    c.m_cap = mcap;
    c.ridge = ridge;
    c.seed = seed;
    c.exec = serial ? Exec::Serial : Exec::Parallel;
    c.validate();
    return c;
  }

  SplitSpec split() const {
    SplitSpec s;
    s.seed = seed;
    s.stratified = !no_stratify;
    return s;
  }
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
  cmd->add_option("--data", f.path, "CSV data file")->required();
  cmd->add_option("--header", f.header, "Header row: auto, yes or no")
      ->check(CLI::IsMember({"auto", "yes", "no"}));
  cmd->add_option("--label-col", f.label_col, "Label column index; negative counts from the end")
      ->default_val(-1);
}

void add_learn_flags(CLI::App* cmd, LearnFlags& f) {
  cmd->add_option("--k", f.k, "Neighbor count")->default_val(3)->check(CLI::PositiveNumber);
  cmd->add_option("--filter", f.filter, "Neighbor filter")->check(CLI::IsMember({"gaussian", "butterworth"}));
  cmd->add_option("--center", f.center, "Within-class center")->check(CLI::IsMember({"weighted", "self"}));
  cmd->add_option("--strategy", f.strategy, "Offspring strategy")->check(CLI::IsMember({"radical", "conservative"}));
  cmd->add_option("--max-metrics", f.max_metrics, "Cap on the group size (em variant)")->check(CLI::PositiveNumber);
  cmd->add_option("--backtrace", f.backtrace, "Consecutive rejections before stopping")
      ->default_val(5)
      ->check(CLI::PositiveNumber);
  cmd->add_option("--theta", f.theta, "Active-instance ambiguity threshold")
      ->default_val(kDefaultTheta)
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--omega", f.omega, "Candidate neighbor list size")->check(CLI::PositiveNumber);
  cmd->add_option("--mcap", f.mcap, "Cap on learned metric rows")->check(CLI::PositiveNumber);
  cmd->add_option("--ridge", f.ridge, "Relative ridge on the constraint matrix")->default_val(kDefaultRidge);
  cmd->add_option("--seed", f.seed, "Random seed")->default_val(0);
  cmd->add_flag("--serial", f.serial, "Use the serial reference kernels");
  cmd->add_flag("--no-stratify", f.no_stratify, "Split without class stratification");
  cmd->add_option("--scaling", f.scaling, "Feature scaling fit on training rows: zscore or none")
      ->check(CLI::IsMember({"zscore", "none"}));
}

std::string pct(double fraction) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * fraction;
  return s.str();
}

std::string pct_or_na(double fraction) { return std::isfinite(fraction) ? pct(fraction) + "%" : "n/a"; }

int cmd_train(const DataFlags& data_flags, const LearnFlags& learn, const std::string& variant_name,
              const std::string& out_path, bool data_ref, std::ostream& out, std::ostream& err) {
  const Variant variant = *parse_variant(variant_name);
  const EvolutionConfig cfg = learn.config();
  const Dataset data = load_csv(data_flags.path, data_flags.csv());
  const SplitSpec spec = learn.split();
  const Split sp = split(data, spec);

  TrainedModel trained = train_variant(variant, data, sp, cfg, learn.scaling_mode());

  ModelFile file;
  file.model = std::move(trained.model);
  file.variant = variant_name;
  file.config = cfg;
  if (variant == Variant::Single) file.config.max_metrics = 1;
  if (variant == Variant::UpToThree) file.config.max_metrics = 3;
  file.split_spec = spec;
  file.split = sp;
  file.training_rows = variant == Variant::Single ? sp.train : sp.pure_train();
  file.report = trained.report;
  file.source.path = data_flags.path;
  file.source.sha256 = sha256_file(data_flags.path);
  file.source.csv = data_flags.csv();
  file.source.embedded = !data_ref;
  save_model(out_path, file);

  const TrainReport& r = trained.report;
  out << "variant        " << variant_name << "\n"
      << "metrics        " << file.model.group.size() << "\n"
      << "attempts       " << r.attempts << " (accepted " << r.accepted_metrics << ")\n"
      << "val error      " << pct_or_na(r.initial_val_error) << " -> " << pct_or_na(r.final_val_error) << "\n"
      << "train size     " << file.model.train.size() << "\n"
      << "wall time      " << std::setprecision(3) << r.wall_time << " s\n"
      << "model          " << out_path << "\n";
  if (r.fallback_to_identity) {
    err << "warning: offspring solve failed (" << r.fallback_reason << "); model falls back to the identity metric\n";
    return kExitTrainingFailure;
  }
  return kExitOk;
}

int cmd_eval(const std::string& model_path, const DataFlags& data_flags, const std::string& rows, std::ostream& out) {
  const ModelFile file = load_model(model_path);
  const Dataset raw = relabel(load_csv(data_flags.path, data_flags.csv()), file.model.class_names);
  if (raw.dim() != file.model.train.dim()) {
    throw DataError("dimension mismatch: data has " + std::to_string(raw.dim()) + " features, model expects " +
                    std::to_string(file.model.train.dim()));
  }
  Dataset subset = raw;
  if (rows != "all") {
    if (sha256_file(data_flags.path) != file.source.sha256) {
      throw DataError("--rows " + rows + " needs the data file the model was trained on (hash mismatch)");
    }
    const auto& idx = rows == "train" ? file.training_rows : rows == "val" ? file.split.val : file.split.test;
    if (idx.empty()) throw DataError("no " + rows + " rows recorded in the model");
    subset = raw.subset(idx);
  }
  const double error = evaluate(file.model, subset);
  const auto wrong = static_cast<long long>(std::llround(error * static_cast<double>(subset.size())));
  out << "error " << pct(error) << "% (" << wrong << "/" << subset.size() << ")\n";
  return kExitOk;
}

std::map<Method, int> parse_k_map(const std::string& text) {
  std::map<Method, int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--k-map entry '" + item + "' is not method=k");
    const auto m = parse_method(item.substr(0, eq));
    if (!m) throw std::invalid_argument("--k-map: unknown method '" + item.substr(0, eq) + "'");
    const int k = std::stoi(item.substr(eq + 1));
    if (k < 1) throw std::invalid_argument("--k-map: k must be positive");
    out[*m] = k;
  }
  return out;
}

int cmd_bench(const DataFlags& data_flags, const LearnFlags& learn, const std::string& methods, int repeats,
              const std::string& k_map, std::optional<Index> pca_dim, std::optional<Index> reduce_dim,
              const std::string& csv_path, std::ostream& out, std::ostream& err) {
  BenchConfig cfg;
  std::stringstream ss(methods);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto m = parse_method(item);
    if (!m) throw std::invalid_argument("unknown method '" + item + "'");
    cfg.methods.push_back(*m);
  }
  cfg.repeats = repeats;
  cfg.k = learn.k;
  cfg.k_map = parse_k_map(k_map);
  cfg.pca_dim = pca_dim;
  cfg.reduce_dim = reduce_dim;
  cfg.split = learn.split();
  cfg.learning = learn.config();
  cfg.scaling = learn.scaling_mode();

  const Dataset data = load_csv(data_flags.path, data_flags.csv());
  const std::string name = std::filesystem::path(data_flags.path).stem().string();
  const BenchReport report = run_bench(data, cfg, name);
  out << format_table(report);
  err << "wall time per repeat (s):";
  for (const auto& m : report.methods) {
    double total = 0.0;
    for (double t : m.wall_times) total += t;
    err << " " << method_key(m.method) << "=" << std::setprecision(3) << total / report.repeats;
  }
  err << "\n";
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw DataError("cannot write " + csv_path);
    csv << format_csv(report);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiple closed-form local metric learning for kNN classification", "cflml"};
  app.require_subcommand(1);

  DataFlags train_data;
  LearnFlags train_learn;
  std::string variant = "cflml1";
  std::string out_path;
  bool data_ref = false;
  auto* train = app.add_subcommand("train", "Learn a metric group and write a model file");
  add_data_flags(train, train_data);
  add_learn_flags(train, train_learn);
  train->add_option("--variant", variant, "cflml1, cflml3 or em")->check(CLI::IsMember({"cflml1", "cflml3", "em"}));
  train->add_option("--out", out_path, "Model file to write")->required();
  train->add_flag("--data-ref", data_ref, "Store a path and hash of the data instead of the instances");

  DataFlags eval_data;
  std::string model_path;
  std::string rows = "all";
  auto* eval = app.add_subcommand("eval", "Report a model's error rate on a data file");
  add_data_flags(eval, eval_data);
  eval->add_option("--model", model_path, "Model file")->required();
  eval->add_option("--rows", rows, "Rows to score: all, train, val or test (split recorded in the model)")
      ->check(CLI::IsMember({"all", "train", "val", "test"}));

  DataFlags bench_data;
  LearnFlags bench_learn;
  std::string methods = "euclidean,pca,lda,cflml1,cflml3,em";
  int repeats = 10;
  std::string k_map;
  std::optional<Index> pca_dim;
  std::optional<Index> reduce_dim;
  std::string csv_path;
  auto* bench = app.add_subcommand("bench", "Repeated split benchmark against Euclidean/PCA/LDA baselines");
  add_data_flags(bench, bench_data);
  add_learn_flags(bench, bench_learn);
  bench->add_option("--methods", methods, "Comma list of euclidean,pca,lda,cflml1,cflml3,em");
  bench->add_option("--repeats", repeats, "Number of random splits")->default_val(10)->check(CLI::PositiveNumber);
  bench->add_option("--k-map", k_map, "Per-method k, e.g. lda=3,cflml1=9");
  bench->add_option("--pca-dim", pca_dim, "Target dimension of the PCA baseline")->check(CLI::PositiveNumber);
  bench->add_option("--reduce", reduce_dim, "PCA-reduce all data to this dimension first")->check(CLI::PositiveNumber);
  bench->add_option("--csv", csv_path, "Write per-repeat errors as CSV");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitDataError;
  }

  try {
    if (*train) return cmd_train(train_data, train_learn, variant, out_path, data_ref, out, err);
    if (*eval) return cmd_eval(model_path, eval_data, rows, out);
    if (*bench) {
      return cmd_bench(bench_data, bench_learn, methods, repeats, k_map, pca_dim, reduce_dim, csv_path, out, err);
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const NumericalError& e) {
    err << "training failed: " << e.what() << "\n";
    return kExitTrainingFailure;
  }
  return kExitDataError;
}

}  // namespace cflml
