#include "fixtures.hpp"

#include "cflml/cli.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace cflml::testing {

namespace {

int stripe_parity(double coordinate, double stripe) {
  const auto band = static_cast<long long>(std::floor(coordinate / stripe));
  return static_cast<int>(((band % 2) + 2) % 2);
}

Dataset from_rows(std::vector<std::array<double, 2>> rows, std::vector<int> labels, int classes) {
  Dataset d;
  d.instances.resize(static_cast<Index>(rows.size()), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.instances(static_cast<Index>(i), 0) = rows[i][0];
    d.instances(static_cast<Index>(i), 1) = rows[i][1];
  }
  d.labels = std::move(labels);
  for (int c = 0; c < classes; ++c) d.class_names.push_back(std::string(1, static_cast<char>('a' + c)));
  return d;
}

}  // namespace

std::filesystem::path data_file(const std::string& name) { return std::filesystem::path(CFLML_DATA_DIR) / name; }

Dataset rotating_stripes(std::uint64_t seed, int per_cell, double stripe) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::vector<std::array<double, 2>> rows;
  std::vector<int> labels;
  constexpr int kCells = 6;
  for (int c = 0; c < kCells; ++c) {
    const double angle = std::numbers::pi * c / kCells;
    const double nx = std::cos(angle), ny = std::sin(angle);
    const double ox = 4.0 * (c % 3), oy = 4.0 * (c / 3);
    for (int i = 0; i < per_cell; ++i) {
      const double px = u(rng), py = u(rng);
      labels.push_back(stripe_parity((px - 2.0) * nx + (py - 2.0) * ny, stripe));
      rows.push_back({px + ox, py + oy});
    }
  }
  return from_rows(std::move(rows), std::move(labels), 2);
}

Dataset crossed_stripes(std::uint64_t seed, int per_cell, double stripe, double length) {
  Rng rng(seed);
  std::uniform_real_distribution<double> across(0.0, 4.0), along(0.0, length);
  std::vector<std::array<double, 2>> rows;
  std::vector<int> labels;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < per_cell; ++i) {
      const double a = across(rng), b = along(rng);
      labels.push_back(stripe_parity(a, stripe));
      rows.push_back(c == 0 ? std::array<double, 2>{a, b} : std::array<double, 2>{6.0 + b, a});
    }
  }
  return from_rows(std::move(rows), std::move(labels), 2);
}

Dataset gaussian_blobs(std::uint64_t seed, int classes, int per_class, Index dim, double separation) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset d;
  d.instances.resize(Index{classes} * per_class, dim);
  for (int c = 0; c < classes; ++c) {
    d.class_names.push_back("c" + std::to_string(c));
    for (int i = 0; i < per_class; ++i) {
      const Index r = Index{c} * per_class + i;
      for (Index j = 0; j < dim; ++j) d.instances(r, j) = g(rng);
      d.instances(r, 0) += separation * c;
      d.labels.push_back(c);
    }
  }
  return d;
}

Dataset noise_labels(std::uint64_t seed, Index n, Index dim, int classes) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, classes - 1);
  Dataset d;
  d.instances.resize(n, dim);
  for (Index r = 0; r < n; ++r) {
    for (Index j = 0; j < dim; ++j) d.instances(r, j) = g(rng);
    d.labels.push_back(r < classes ? static_cast<int>(r) : pick(rng));
  }
  for (int c = 0; c < classes; ++c) d.class_names.push_back("c" + std::to_string(c));
  return d;
}

RowMatrix random_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  RowMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = g(rng);
  return m;
}

Matrix random_symmetric(Rng& rng, Index n) {
  const Matrix a = random_matrix(rng, n, n);
  return 0.5 * (a + a.transpose());
}

Matrix random_spd(Rng& rng, Index n, double floor) {
  const Matrix a = random_matrix(rng, n, n);
  return a * a.transpose() + floor * Matrix::Identity(n, n);
}

Matrix random_psd(Rng& rng, Index n, Index rank) {
  const Matrix a = random_matrix(rng, n, rank);
  return a * a.transpose();
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  for (Index j = 0; j < data.dim(); ++j) out << "f" << j << ",";
  out << "label\n";
  out << std::setprecision(17);
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) out << data.instances(i, j) << ",";
    out << data.class_names[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])] << "\n";
  }
}

TempDir::TempDir() {
  static int counter = 0;
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("cflml-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

CliRun run_tool(std::vector<std::string> args) {
  args.insert(args.begin(), "cflml");
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double c_orthonormality_error(const Matrix& y, const Matrix& c) {
  const LongMatrix yl = y.cast<long double>();
  const LongMatrix g = yl.transpose() * c.cast<long double>() * yl;
  return static_cast<double>((g - LongMatrix::Identity(y.cols(), y.cols())).cwiseAbs().maxCoeff());
}

}  // namespace cflml::testing
