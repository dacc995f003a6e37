#include "cflml/offspring.hpp"

#include <cmath>

namespace cflml {

InstanceScatter scatter_for_instance(Index i, const TrainingSet& train, const OmegaCache& omega,
                                     const Neighborhood& hood) {
  const Index n = train.dim();
  const auto& st = hood.stats[static_cast<std::size_t>(i)];
  const auto members = omega.of(i);
  const auto dist = hood.distances_of(i);
  const int own = train.labels[static_cast<std::size_t>(i)];
  const double sigma = hood.sigma[static_cast<std::size_t>(i)];

  Matrix same = Matrix::Zero(n, n);
  Matrix diff = Matrix::Zero(n, n);
  for (std::size_t t = 0; t < members.size(); ++t) {
    const Index j = members[t];
    const Vector offset = st.center - train.x.row(j).transpose();
    const double p = filter_weight(hood.filter, dist[t], sigma);
    if (train.labels[static_cast<std::size_t>(j)] == own) {
      same.noalias() += p * offset * offset.transpose();
    } else {
      diff.noalias() += p * offset * offset.transpose();
    }
  }

  InstanceScatter out;
  out.same = st.p_same > 0.0 ? Matrix(same / st.p_same) : Matrix::Zero(n, n);
  out.diff = st.p_diff > 0.0 ? Matrix(diff / st.p_diff) : Matrix::Zero(n, n);
  out.total = st.p_total > 0.0 ? Matrix((st.p_same * out.same + st.p_diff * out.diff) / st.p_total)
                               : Matrix::Zero(n, n);
  return out;
}

ScatterPair assemble(std::span<const InstanceScatter> scatters, std::span<const double> weights,
                     std::span<const char> active) {
  if (scatters.size() != weights.size() || scatters.size() != active.size()) {
    throw std::invalid_argument("assemble: input lengths differ");
  }
  const Index n = scatters.empty() ? 0 : scatters.front().total.rows();
  Matrix between = Matrix::Zero(n, n);
  Matrix total = Matrix::Zero(n, n);
  ScatterPair out;
  for (std::size_t i = 0; i < scatters.size(); ++i) {
    if (!active[i] || weights[i] == 0.0) continue;
    between += weights[i] * (scatters[i].diff - scatters[i].same);
    total += weights[i] * scatters[i].total;
    ++out.active_count;
    out.weight_sum += weights[i];
  }
  out.between = SymMatrix(between);
  out.total = SymMatrix(total);
  return out;
}

ScatterPair assemble_scatter(const TrainingSet& train, const OmegaCache& omega,
                             std::span<const kernels::ScatterSource> sources, Exec exec) {
  if (static_cast<Index>(sources.size()) != train.size()) {
    throw std::invalid_argument("assemble_scatter: one source per training instance required");
  }
  const kernels::ScatterSums sums = exec == Exec::Serial ? kernels::serial::scatter_sums(train, omega, sources)
                                                         : kernels::omp::scatter_sums(train, omega, sources);
  ScatterPair out;
  out.between = SymMatrix(sums.between);
  out.total = SymMatrix(sums.total);
  out.active_count = sums.active_count;
  out.weight_sum = sums.weight_sum;
  return out;
}

ChildResult solve_child(const ScatterPair& scatter, const ChildOptions& options) {
  ChildResult out;
  if (scatter.empty()) {
    out.failure = "no active instance";
    return out;
  }
  const GenEigResult full = gen_eig_sym_definite(scatter.between, scatter.total, options.ridge);
  GenEigResult kept = positive_truncate(full, options.positive_cutoff);
  out.shift = full.shift;
  if (kept.retained == 0) {
    out.failure = "no positive generalized eigenvalue";
    return out;
  }
  Index m = kept.retained;
  if (options.m_cap) m = std::min(m, std::max<Index>(1, *options.m_cap));
  out.eigenvalues = kept.eigenvalues.head(m);
  out.directions = kept.eigenvectors.leftCols(m).transpose();

  // Closed-form optimality certificate: Y C Yᵀ = I and Tr(Y B Yᵀ) = Σ λ_k.
  const Index n = scatter.total.order();
  const Matrix c_reg = scatter.total.matrix() + out.shift * Matrix::Identity(n, n);
  const Matrix gram = out.directions * c_reg * out.directions.transpose();
  const double ortho_err = (gram - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  const double trace = (out.directions * scatter.between.matrix() * out.directions.transpose()).trace();
  const double lambda_sum = out.eigenvalues.sum();
  if (ortho_err > 1e-8 || std::abs(trace - lambda_sum) > 1e-8 * (1.0 + out.eigenvalues.cwiseAbs().sum())) {
    out.failure = "generalized eigenvectors failed the orthonormality/trace check";
    return out;
  }

  out.metric = Metric(out.eigenvalues.asDiagonal() * out.directions);
  return out;
}

}  // namespace cflml
