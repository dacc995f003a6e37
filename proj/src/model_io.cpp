#include "cflml/model_io.hpp"

#include "cflml/names.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace cflml {

using Json = nlohmann::ordered_json;

namespace {

Json real_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double real_or_nan(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

Json vector_json(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Json matrix_json(const Matrix& m) {
  std::vector<double> row_major;
  row_major.reserve(static_cast<std::size_t>(m.size()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) row_major.push_back(m(r, c));
  }
  return Json{{"m", m.rows()}, {"n", m.cols()}, {"L", row_major}};
}

Matrix matrix_from(const Json& j) {
  const auto m = j.at("m").get<Index>();
  const auto n = j.at("n").get<Index>();
  const auto values = j.at("L").get<std::vector<double>>();
  if (m < 0 || n < 0 || static_cast<Index>(values.size()) != m * n) {
    throw DataError("model file: metric entry count does not match its shape");
  }
  Matrix out(m, n);
  for (Index r = 0; r < m; ++r) {
    for (Index c = 0; c < n; ++c) out(r, c) = values[static_cast<std::size_t>(r * n + c)];
  }
  return out;
}

std::string_view header_name(HeaderMode h) {
  switch (h) {
    case HeaderMode::Auto:
      return "auto";
    case HeaderMode::Present:
      return "yes";
    case HeaderMode::Absent:
      return "no";
  }
  return "auto";
}

HeaderMode header_from(std::string_view s) {
  if (s == "yes") return HeaderMode::Present;
  if (s == "no") return HeaderMode::Absent;
  return HeaderMode::Auto;
}

Json report_json(const TrainReport& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    steps.push_back(
        {{"attempt", s.attempt}, {"val_error", real_or_null(s.val_error)}, {"accepted", s.accepted}, {"failure", s.failure}});
  }
  return Json{{"accepted_metrics", r.accepted_metrics},
              {"attempts", r.attempts},
              {"initial_val_error", real_or_null(r.initial_val_error)},
              {"final_val_error", real_or_null(r.final_val_error)},
              {"fallback_to_identity", r.fallback_to_identity},
              {"fallback_reason", r.fallback_reason},
              {"steps", steps}};
}

TrainReport report_from(const Json& j) {
  TrainReport r;
  r.accepted_metrics = j.at("accepted_metrics").get<int>();
  r.attempts = j.at("attempts").get<int>();
  r.initial_val_error = real_or_nan(j.at("initial_val_error"));
  r.final_val_error = real_or_nan(j.at("final_val_error"));
  r.fallback_to_identity = j.at("fallback_to_identity").get<bool>();
  r.fallback_reason = j.at("fallback_reason").get<std::string>();
  for (const auto& s : j.at("steps")) {
    r.steps.push_back({s.at("attempt").get<int>(), real_or_nan(s.at("val_error")), s.at("accepted").get<bool>(),
                       s.at("failure").get<std::string>()});
  }
  return r;
}

template <typename E>
E enum_from(const Json& j, std::optional<E> (*parse)(std::string_view), const char* what) {
  const auto v = parse(j.get<std::string>());
  if (!v) throw DataError(std::string("model file: unknown ") + what + " '" + j.get<std::string>() + "'");
  return *v;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw DataError("sha256: init failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

std::string serialize_model(const ModelFile& file) {
  const Model& model = file.model;
  model.validate();
  const EvolutionConfig& cfg = file.config;

  Json metrics = Json::array();
  for (const auto& m : model.group.metrics()) metrics.push_back(matrix_json(m.factor()));

  Json training{{"mode", file.source.embedded ? "embedded" : "reference"},
                {"source", {{"path", file.source.path},
                            {"sha256", file.source.sha256},
                            {"header", header_name(file.source.csv.header)},
                            {"label_column", file.source.csv.label_column}}},
                {"rows", file.training_rows}};
  if (file.source.embedded) {
    Json inst = matrix_json(model.train.x);
    training["instances"] = {{"rows", model.train.size()}, {"cols", model.train.dim()}, {"values", inst.at("L")}};
    training["labels"] = model.train.labels;
  }

  Json j{{"format", "cflml-model"},
         {"format_version", kModelFormatVersion},
         {"variant", file.variant},
         {"hyperparameters",
          {{"k", model.k},
           {"filter", to_string(model.filter)},
           {"center", to_string(model.center)},
           {"theta", model.group.theta()},
           {"strategy", to_string(cfg.strategy)},
           {"max_metrics", optional_json(cfg.max_metrics)},
           {"backtrace", cfg.backtrace_max},
           {"omega", optional_json(cfg.omega_capacity)},
           {"mcap", optional_json(cfg.m_cap)},
           {"ridge", cfg.ridge},
           {"seed", cfg.seed}}},
         {"class_names", model.class_names},
         {"standardizer", {{"mean", vector_json(model.standardizer.mean())}, {"scale", vector_json(model.standardizer.scale())}}},
         {"metrics", metrics},
         {"association", model.group.association()},
         {"group_w", model.group.group_w()},
         {"training", training},
         {"split",
          {{"seed", file.split_spec.seed},
           {"train_frac", file.split_spec.train_frac},
           {"val_frac_of_train", file.split_spec.val_frac_of_train},
           {"stratified", file.split_spec.stratified},
           {"train", file.split.train},
           {"val", file.split.val},
           {"test", file.split.test}}},
         {"report", report_json(file.report)}};
  return j.dump() + "\n";
}

ModelFile parse_model(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "cflml-model") throw DataError("model file: unrecognized format");
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError("model file: unsupported format_version " + std::to_string(version));
    }

    ModelFile file;
    file.variant = j.at("variant").get<std::string>();
    const Json& hp = j.at("hyperparameters");
    EvolutionConfig& cfg = file.config;
    cfg.k = hp.at("k").get<int>();
    cfg.filter = enum_from(hp.at("filter"), parse_filter, "filter");
    cfg.center = enum_from(hp.at("center"), parse_center, "center");
    cfg.theta = hp.at("theta").get<double>();
    cfg.strategy = enum_from(hp.at("strategy"), parse_strategy, "strategy");
    cfg.max_metrics = optional_from<int>(hp.at("max_metrics"));
    cfg.backtrace_max = hp.at("backtrace").get<int>();
    cfg.omega_capacity = optional_from<Index>(hp.at("omega"));
    cfg.m_cap = optional_from<Index>(hp.at("mcap"));
    cfg.ridge = hp.at("ridge").get<double>();
    cfg.seed = hp.at("seed").get<std::uint64_t>();

    Model& model = file.model;
    model.k = cfg.k;
    model.filter = cfg.filter;
    model.center = cfg.center;
    model.class_names = j.at("class_names").get<std::vector<std::string>>();
    model.standardizer =
        Standardizer(vector_from(j.at("standardizer").at("mean")), vector_from(j.at("standardizer").at("scale")));

    std::vector<Metric> metrics;
    for (const auto& m : j.at("metrics")) metrics.emplace_back(matrix_from(m));
    model.group = MetricGroup::restore(std::move(metrics), j.at("association").get<std::vector<int>>(),
                                       j.at("group_w").get<std::vector<double>>(), cfg.theta);

    const Json& sp = j.at("split");
    file.split_spec = {sp.at("seed").get<std::uint64_t>(), sp.at("train_frac").get<double>(),
                       sp.at("val_frac_of_train").get<double>(), sp.at("stratified").get<bool>()};
    file.split = {sp.at("train").get<std::vector<Index>>(), sp.at("val").get<std::vector<Index>>(),
                  sp.at("test").get<std::vector<Index>>()};

    const Json& tr = j.at("training");
    const Json& src = tr.at("source");
    file.source.path = src.at("path").get<std::string>();
    file.source.sha256 = src.at("sha256").get<std::string>();
    file.source.csv.header = header_from(src.at("header").get<std::string>());
    file.source.csv.label_column = src.at("label_column").get<Index>();
    file.training_rows = tr.at("rows").get<std::vector<Index>>();
    const auto mode = tr.at("mode").get<std::string>();
    if (mode == "embedded") {
      file.source.embedded = true;
      const Json& inst = tr.at("instances");
      model.train.x = matrix_from({{"m", inst.at("rows")}, {"n", inst.at("cols")}, {"L", inst.at("values")}});
      model.train.labels = tr.at("labels").get<std::vector<int>>();
    } else if (mode == "reference") {
      file.source.embedded = false;
      if (sha256_file(file.source.path) != file.source.sha256) {
        throw DataError("model file: referenced data " + file.source.path + " has changed (hash mismatch)");
      }
      const Dataset raw = relabel(load_csv(file.source.path, file.source.csv), model.class_names);
      for (Index r : file.training_rows) {
        if (r < 0 || r >= raw.size()) throw DataError("model file: training row index out of range");
      }
      const Dataset part = raw.subset(file.training_rows);
      model.train.x = model.standardizer.apply(part.instances);
      model.train.labels = part.labels;
    } else {
      throw DataError("model file: unknown training mode '" + mode + "'");
    }
    file.report = report_from(j.at("report"));
    model.validate();
    return file;
  } catch (const Json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
  const std::string text = serialize_model(file);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_model(text.str());
}

}  // namespace cflml
