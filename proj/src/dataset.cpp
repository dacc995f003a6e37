#include "cflml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace cflml {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_real(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

std::size_t resolve_label_column(Index label_column, std::size_t columns) {
  const auto c = static_cast<Index>(columns);
  const Index resolved = label_column < 0 ? c + label_column : label_column;
  if (resolved < 0 || resolved >= c) {
    throw DataError("label column " + std::to_string(label_column) + " out of range for " +
                    std::to_string(columns) + " columns");
  }
  return static_cast<std::size_t>(resolved);
}

}  // namespace

Dataset Dataset::subset(std::span<const Index> idx) const {
  Dataset out;
  out.instances.resize(static_cast<Index>(idx.size()), dim());
  out.labels.reserve(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.instances.row(static_cast<Index>(r)) = instances.row(idx[r]);
    out.labels.push_back(labels[static_cast<std::size_t>(idx[r])]);
  }
  out.class_names = class_names;
  return out;
}

Dataset relabel(const Dataset& data, const std::vector<std::string>& class_names) {
  std::unordered_map<std::string, int> ids;
  for (std::size_t c = 0; c < class_names.size(); ++c) ids.emplace(class_names[c], static_cast<int>(c));
  Dataset out;
  out.instances = data.instances;
  out.class_names = class_names;
  out.labels.reserve(data.labels.size());
  for (int y : data.labels) {
    const auto it = ids.find(data.class_names[static_cast<std::size_t>(y)]);
    out.labels.push_back(it == ids.end() ? -1 : it->second);
  }
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_csv(in, options, path.string());
}

Dataset parse_csv(std::istream& in, const CsvOptions& options, std::string_view source) {
  const std::string where(source);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    rows.emplace_back(fields.begin(), fields.end());
    line_numbers.push_back(line_no);
  }
  if (in.bad()) throw DataError(where + ": read failure");
  if (rows.empty()) throw DataError(where + ": no rows");

  const std::size_t columns = rows.front().size();
  if (columns < 2) throw DataError(where + ": need at least one feature column and a label column");
  const std::size_t label_col = resolve_label_column(options.label_column, columns);

  bool has_header = options.header == HeaderMode::Present;
  if (options.header == HeaderMode::Auto) {
    for (std::size_t c = 0; c < columns; ++c) {
      if (c != label_col && !rows.front()[c].empty() && !parse_real(rows.front()[c])) {
        has_header = true;
        break;
      }
    }
  }
  const std::size_t first = has_header ? 1 : 0;
  if (rows.size() <= first) throw DataError(where + ": no data rows");

  Dataset data;
  const auto n_rows = static_cast<Index>(rows.size() - first);
  data.instances.resize(n_rows, static_cast<Index>(columns - 1));
  data.labels.reserve(rows.size() - first);
  std::unordered_map<std::string, int> ids;

  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string at = where + ":" + std::to_string(line_numbers[r]);
    if (row.size() != columns) {
      throw DataError(at + ": ragged row with " + std::to_string(row.size()) + " columns, expected " +
                      std::to_string(columns));
    }
    const auto out_row = static_cast<Index>(r - first);
    Index feature = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      if (c == label_col) continue;
      if (row[c].empty()) throw DataError(at + ": column " + std::to_string(c + 1) + ": missing feature value");
      const auto value = parse_real(row[c]);
      if (!value) {
        throw DataError(at + ": column " + std::to_string(c + 1) + ": non-numeric feature value '" + row[c] +
                        "'");
      }
      if (!std::isfinite(*value)) {
        throw DataError(at + ": column " + std::to_string(c + 1) + ": non-finite feature value");
      }
      data.instances(out_row, feature++) = *value;
    }
    const std::string& label = row[label_col];
    if (label.empty()) throw DataError(at + ": missing label");
    auto [it, inserted] = ids.try_emplace(label, static_cast<int>(data.class_names.size()));
    if (inserted) data.class_names.push_back(label);
    data.labels.push_back(it->second);
  }
  return data;
}

Standardizer::Standardizer(Vector mean, Vector scale) : mean_(std::move(mean)), scale_(std::move(scale)) {
  if (mean_.size() != scale_.size()) throw std::invalid_argument("standardizer: mean/scale size mismatch");
}

RowMatrix Standardizer::apply(const RowMatrix& x) const {
  if (x.cols() != dim()) throw std::invalid_argument("standardizer: dimension mismatch");
  RowMatrix z(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    z.row(r) = (x.row(r) - mean_.transpose()).cwiseQuotient(scale_.transpose());
  }
  return z;
}

Vector Standardizer::apply(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("standardizer: dimension mismatch");
  return (x - mean_).cwiseQuotient(scale_);
}

RowMatrix Standardizer::invert(const RowMatrix& z) const {
  if (z.cols() != dim()) throw std::invalid_argument("standardizer: dimension mismatch");
  RowMatrix x(z.rows(), z.cols());
  for (Index r = 0; r < z.rows(); ++r) {
    x.row(r) = z.row(r).cwiseProduct(scale_.transpose()) + mean_.transpose();
  }
  return x;
}

Standardizer fit_standardizer(const Dataset& data, std::span<const Index> train_idx, Scaling scaling) {
  if (train_idx.empty()) throw DataError("fit_standardizer: empty training index list");
  const Index n = data.dim();
  if (scaling == Scaling::None) return Standardizer(Vector::Zero(n), Vector::Ones(n));
  const auto count = static_cast<double>(train_idx.size());
  Vector mean = Vector::Zero(n);
  for (Index i : train_idx) mean += data.instances.row(i).transpose();
  mean /= count;
  Vector var = Vector::Zero(n);
  for (Index i : train_idx) var += (data.instances.row(i).transpose() - mean).cwiseAbs2();
  var /= count;
  Vector scale(n);
  for (Index f = 0; f < n; ++f) {
    const double sd = std::sqrt(var[f]);
    scale[f] = sd > 1e-12 * (1.0 + std::abs(mean[f])) ? sd : 1.0;
  }
  return Standardizer(std::move(mean), std::move(scale));
}

std::vector<Index> Split::pure_train() const {
  std::vector<Index> out;
  out.reserve(train.size() - val.size());
  std::set_difference(train.begin(), train.end(), val.begin(), val.end(), std::back_inserter(out));
  return out;
}

namespace {

// Largest-remainder apportionment of `total` across groups proportional to their sizes,
// with each group's share capped at `cap[g]`.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<std::size_t>& sizes,
                                   const std::vector<std::size_t>& cap) {
  const double sum = std::accumulate(sizes.begin(), sizes.end(), 0.0);
  std::vector<std::size_t> share(sizes.size());
  std::vector<std::pair<double, std::size_t>> remainder;
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    const double exact = sum > 0 ? static_cast<double>(total) * static_cast<double>(sizes[g]) / sum : 0.0;
    share[g] = std::min(static_cast<std::size_t>(std::floor(exact)), cap[g]);
    assigned += share[g];
    remainder.emplace_back(exact - std::floor(exact), g);
  }
  std::stable_sort(remainder.begin(), remainder.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [frac, g] : remainder) {
    if (assigned >= total) break;
    if (share[g] < cap[g]) {
      ++share[g];
      ++assigned;
    }
  }
  return share;
}

std::size_t rounded_count(std::size_t n, double frac) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * frac));
}

}  // namespace

Split split(const Dataset& data, const SplitSpec& spec) {
  if (!(spec.train_frac > 0.0 && spec.train_frac <= 1.0)) throw DataError("split: train_frac must be in (0, 1]");
  if (!(spec.val_frac_of_train >= 0.0 && spec.val_frac_of_train < 1.0)) {
    throw DataError("split: val_frac_of_train must be in [0, 1)");
  }
  const auto n = static_cast<std::size_t>(data.size());
  std::mt19937_64 rng(spec.seed);
  Split out;

  if (!spec.stratified) {
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_test = std::min(n - 1, rounded_count(n, 1.0 - spec.train_frac));
    out.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    const std::size_t n_val = std::min(out.train.size() - 1, rounded_count(out.train.size(), spec.val_frac_of_train));
    out.val.assign(out.train.begin(), out.train.begin() + static_cast<std::ptrdiff_t>(n_val));
  } else {
    const auto c = static_cast<std::size_t>(data.num_classes());
    if (n < 2 * c) throw DataError("split: stratified split needs at least two instances per class");
    std::vector<std::vector<Index>> by_class(c);
    for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(data.labels[i])].push_back(static_cast<Index>(i));
    std::vector<std::size_t> sizes(c), cap(c);
    for (std::size_t k = 0; k < c; ++k) {
      if (by_class[k].size() < 2) {
        throw DataError("split: class '" + data.class_names[k] + "' has a single instance; cannot stratify");
      }
      std::shuffle(by_class[k].begin(), by_class[k].end(), rng);
      sizes[k] = by_class[k].size();
      cap[k] = sizes[k] - 1;
    }
    const auto test_share = apportion(rounded_count(n, 1.0 - spec.train_frac), sizes, cap);
    std::vector<std::size_t> train_sizes(c), val_cap(c);
    std::size_t n_train = 0;
    for (std::size_t k = 0; k < c; ++k) {
      train_sizes[k] = sizes[k] - test_share[k];
      val_cap[k] = train_sizes[k] - 1;
      n_train += train_sizes[k];
    }
    const auto val_share = apportion(rounded_count(n_train, spec.val_frac_of_train), train_sizes, val_cap);
    for (std::size_t k = 0; k < c; ++k) {
      const auto& members = by_class[k];
      const auto t = static_cast<std::ptrdiff_t>(test_share[k]);
      const auto v = static_cast<std::ptrdiff_t>(val_share[k]);
      out.test.insert(out.test.end(), members.begin(), members.begin() + t);
      out.val.insert(out.val.end(), members.begin() + t, members.begin() + t + v);
      out.train.insert(out.train.end(), members.begin() + t, members.end());
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace cflml
