#pragma once

#include "cflml/classify.hpp"
#include "cflml/dataset.hpp"
#include "cflml/evolution.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace cflml {

inline constexpr int kModelFormatVersion = 1;

/// Where the training data came from. With `embedded == false` the model stores only the
/// source path, its content hash and the training row indices.
struct DataSource {
  std::string path;
  std::string sha256;
  CsvOptions csv;
  bool embedded = true;
};

struct ModelFile {
  Model model;
  std::string variant;
  EvolutionConfig config;
  SplitSpec split_spec;
  Split split;
  std::vector<Index> training_rows;  ///< rows of the source file held in model.train
  TrainReport report;
  DataSource source;
};

/// Versioned JSON text. Doubles are written in shortest round-trip form, so a saved and
/// reloaded model predicts bit-identically.
std::string serialize_model(const ModelFile& file);

/// Reference-mode models re-read their source CSV and check its hash.
ModelFile parse_model(std::string_view text);

void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace cflml
