#pragma once

#include "cflml/common.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cflml {

/// Labelled instances. Labels are dense ids into `class_names`.
struct Dataset {
  RowMatrix instances;
  std::vector<int> labels;
  std::vector<std::string> class_names;

  Index size() const { return instances.rows(); }
  Index dim() const { return instances.cols(); }
  int num_classes() const { return static_cast<int>(class_names.size()); }

  /// Rows `idx` in the given order; class names are kept so ids stay valid.
  Dataset subset(std::span<const Index> idx) const;
};

enum class HeaderMode { Auto, Present, Absent };

struct CsvOptions {
  HeaderMode header = HeaderMode::Auto;
  /// Column holding the class label; negative values count from the end.
  Index label_column = -1;
};

/// Labels are encoded in order of first appearance.
/// Re-encodes labels against `class_names`; names not in the list map to -1.
Dataset relabel(const Dataset& data, const std::vector<std::string>& class_names);

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options, std::string_view source = "<stream>");

/// Per-feature z-scoring fitted on training rows.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(Vector mean, Vector scale);

  const Vector& mean() const { return mean_; }
  const Vector& scale() const { return scale_; }
  Index dim() const { return mean_.size(); }

  RowMatrix apply(const RowMatrix& x) const;
  Vector apply(const Vector& x) const;
  RowMatrix invert(const RowMatrix& z) const;

 private:
  Vector mean_;
  Vector scale_;
};

/// ZScore: population mean/std over the training rows. None: mean 0, scale 1 (raw features).
enum class Scaling { ZScore, None };

/// Population statistics over `train_idx`; zero-variance features get scale 1.
Standardizer fit_standardizer(const Dataset& data, std::span<const Index> train_idx,
                              Scaling scaling = Scaling::ZScore);

struct SplitSpec {
  std::uint64_t seed = 0;
  double train_frac = 0.80;
  double val_frac_of_train = 0.15;
  bool stratified = true;
};

/// Index sets are sorted ascending. `val` is a subset of `train`.
struct Split {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;

  /// Training indices with the validation carve-out removed.
  std::vector<Index> pure_train() const;
};

Split split(const Dataset& data, const SplitSpec& spec);

}  // namespace cflml
