#pragma once

#include "cflml/common.hpp"
#include "cflml/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace cflml::testing {

using Rng = std::mt19937_64;

std::filesystem::path data_file(const std::string& name);

/// Six 4×4 cells on a 3×2 grid. Inside each cell the two classes alternate in parallel
/// stripes of width `stripe`; the stripe orientation turns by 30° from cell to cell, so
/// no single global projection separates the classes.
Dataset rotating_stripes(std::uint64_t seed, int per_cell = 200, double stripe = 1.33);

/// Two cells forming an L. The first spans 4 along x and `length` along y with classes
/// alternating in x-stripes of width `stripe`; the second is the same cell turned by 90°
/// and moved right, so the two regions need opposite anisotropy.
Dataset crossed_stripes(std::uint64_t seed, int per_cell = 500, double stripe = 0.5, double length = 8.0);

/// Isotropic unit-variance Gaussian blobs, one per class, centers `separation` apart on
/// a line.
Dataset gaussian_blobs(std::uint64_t seed, int classes, int per_class, Index dim, double separation);

/// Standard-normal features with labels drawn independently of them.
Dataset noise_labels(std::uint64_t seed, Index n, Index dim, int classes);

RowMatrix random_matrix(Rng& rng, Index rows, Index cols);
Matrix random_symmetric(Rng& rng, Index n);
/// Full-rank PSD with smallest eigenvalue at least `floor`.
Matrix random_spd(Rng& rng, Index n, double floor = 0.1);
/// PSD of rank `rank` (rank < n gives a singular matrix).
Matrix random_psd(Rng& rng, Index n, Index rank);

void write_csv(const std::filesystem::path& path, const Dataset& data);

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

/// Runs the command-line entry point in process; `args` excludes the program name.
CliRun run_tool(std::vector<std::string> args);

std::string read_file(const std::filesystem::path& path);

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

/// max |YᵀCY − I| over the columns of `y`, accumulated in long double so the check itself
/// does not lose cond(C)·eps.
double c_orthonormality_error(const Matrix& y, const Matrix& c);

}  // namespace cflml::testing
