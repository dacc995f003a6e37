#include "cflml/classify.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

namespace cflml {
namespace {

using testing::Rng;

RowMatrix points(std::initializer_list<std::array<double, 2>> rows) {
  RowMatrix x(static_cast<Index>(rows.size()), 2);
  Index i = 0;
  for (const auto& r : rows) {
    x(i, 0) = r[0];
    x(i, 1) = r[1];
    ++i;
  }
  return x;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Model make_model(std::vector<Metric> metrics, std::vector<int> association, RowMatrix x, std::vector<int> labels,
                 int classes, int k) {
  Model m;
  const Index n = x.cols();
  m.group = MetricGroup::restore(std::move(metrics), std::move(association), {}, 0.1);
  m.standardizer = Standardizer(Vector::Zero(n), Vector::Ones(n));
  m.train = {std::move(x), std::move(labels)};
  for (int c = 0; c < classes; ++c) m.class_names.push_back("c" + std::to_string(c));
  m.k = k;
  return m;
}

std::vector<Index> brute_knn(const RowMatrix& x, const Vector& q, Index k) {
  std::vector<std::pair<double, Index>> d;
  for (Index i = 0; i < x.rows(); ++i) d.emplace_back((x.row(i).transpose() - q).squaredNorm(), i);
  std::sort(d.begin(), d.end());
  std::vector<Index> out;
  for (Index t = 0; t < k; ++t) out.push_back(d[static_cast<std::size_t>(t)].second);
  return out;
}

TEST(KnnQuery, Examples) {
  const RowMatrix x = points({{1, 0}, {0, 2}});
  EXPECT_EQ(knn_query(Metric::identity(2), vec2(0, 0), x, 1), (std::vector<Index>{0}));
  Matrix l(2, 2);
  l << 3, 0, 0, 1;
  EXPECT_EQ(knn_query(Metric(l), vec2(0, 0), x, 1), (std::vector<Index>{1}));
  EXPECT_THROW(knn_query(Metric::identity(2), vec2(0, 0), x, 3), std::invalid_argument);
}

TEST(KnnQuery, TiesToSmallerIndex) {
  const RowMatrix x = points({{0, 1}, {1, 0}, {0, -1}, {-1, 0}});
  EXPECT_EQ(knn_query(Metric::identity(2), vec2(0, 0), x, 3), (std::vector<Index>{0, 1, 2}));
}

TEST(KnnQuery, MatchesBruteForce) {
  Rng rng(10);
  const RowMatrix x = testing::random_matrix(rng, 60, 4);
  for (int q = 0; q < 30; ++q) {
    const Vector query = testing::random_matrix(rng, 4, 1);
    EXPECT_EQ(knn_query(Metric::identity(4), query, x, 7), brute_knn(x, query, 7));
  }
}

TEST(Vote, MajorityAndTies) {
  const std::vector<int> labels{0, 0, 1, 1, 2};
  EXPECT_EQ(vote(std::vector<Index>{0, 1, 2}, labels, 3).label, 0);
  EXPECT_EQ(vote(std::vector<Index>{2, 0}, labels, 3).label, 1);
  EXPECT_EQ(vote(std::vector<Index>{0, 2}, labels, 3).label, 0);
  // Tied between classes 1 and 0; class 1 has the nearest instance among them.
  const Prediction p = vote(std::vector<Index>{4, 2, 0, 3, 1}, labels, 3);
  EXPECT_EQ(p.label, 1);
  EXPECT_EQ(p.vote_counts, (std::vector<int>{2, 2, 1}));
}

TEST(Predict, DuplicateQueryGetsItsLabel) {
  Rng rng(12);
  const RowMatrix x = testing::random_matrix(rng, 20, 3);
  std::vector<int> labels(20);
  for (int i = 0; i < 20; ++i) labels[static_cast<std::size_t>(i)] = i % 3;
  const Model m = make_model({Metric::identity(3)}, std::vector<int>(20, 0), x, labels, 3, 1);
  for (Index i = 0; i < 20; ++i) EXPECT_EQ(predict(m, x.row(i).transpose()).label, labels[static_cast<std::size_t>(i)]);
}

TEST(Predict, TieResolvedByNearest) {
  const RowMatrix x = points({{1, 0}, {3, 0}});
  const Model m = make_model({Metric::identity(2)}, {0, 0}, x, {0, 1}, 2, 2);
  EXPECT_EQ(predict(m, vec2(0, 0)).label, 0);
  EXPECT_EQ(predict(m, vec2(4, 0)).label, 1);
}

TEST(Predict, PredictionFields) {
  const RowMatrix x = points({{0, 0}, {1, 0}, {5, 0}});
  const Model m = make_model({Metric::identity(2)}, {0, 0, 0}, x, {0, 0, 1}, 2, 3);
  const Prediction p = predict(m, vec2(0.9, 0));
  EXPECT_EQ(p.label, 0);
  EXPECT_EQ(p.chosen_metric, 0);
  EXPECT_EQ(p.neighbor_ids, (std::vector<Index>{1, 0, 2}));
  EXPECT_EQ(p.vote_counts, (std::vector<int>{2, 1}));
  EXPECT_THROW(predict(m, Vector::Zero(3)), std::invalid_argument);
}

TEST(Predict, StandardizesQueries) {
  const RowMatrix z = points({{-1, 0}, {1, 0}});
  Model m = make_model({Metric::identity(2)}, {0, 0}, z, {0, 1}, 2, 1);
  m.standardizer = Standardizer(vec2(10, 0), vec2(5, 1));
  EXPECT_EQ(predict(m, vec2(6, 0)).label, 0);
  EXPECT_EQ(predict(m, vec2(14, 0)).label, 1);
}

TEST(SelectMetric, SingleMetricIsZero) {
  const Model m = make_model({Metric::identity(2)}, {0, 0}, points({{0, 0}, {1, 1}}), {0, 1}, 2, 1);
  EXPECT_EQ(select_metric(m, vec2(5, 5)), 0);
}

TEST(SelectMetric, UnanimousCount) {
  // Under metric 0 (x only) the nearest points are 0 and 1, both linked to metric 1.
  // Under metric 1 (y only) the nearest are 0 and 1 again, linked to metric 1.
  Matrix lx(1, 2), ly(1, 2);
  lx << 1, 0;
  ly << 0, 1;
  const RowMatrix x = points({{0, 0}, {0.1, 0.1}, {5, 5}, {6, 6}});
  const Model m = make_model({Metric(lx), Metric(ly)}, {1, 1, 0, 0}, x, {0, 0, 1, 1}, 2, 2);
  EXPECT_EQ(select_metric(m, vec2(0, 0)), 1);
}

TEST(SelectMetric, CountTieGoesToOlderMetric) {
  const RowMatrix x = points({{0, 0}, {3, 3}});
  const Model m = make_model({Metric::identity(2), Metric::identity(2).scaled(2)}, {0, 1}, x, {0, 1}, 2, 2);
  EXPECT_EQ(select_metric(m, vec2(1, 1)), 0);
}

TEST(SelectMetric, MatchesExhaustiveCount) {
  const RowMatrix x = points({{0, 0}, {1, 0}, {2, 0.5}, {0, 1}, {1.5, 1.5}, {3, 1}, {0.5, 2.5}, {2.5, 3}});
  const std::vector<int> assoc{0, 1, 2, 1, 0, 2, 2, 1};
  Matrix l1(1, 2), l2(2, 2);
  l1 << 1, 0;
  l2 << 0.2, 0, 0, 2;
  const std::vector<Metric> metrics{Metric::identity(2), Metric(l1), Metric(l2)};
  const std::vector<Matrix> factors{Matrix::Identity(2, 2), l1, l2};
  Rng rng(14);
  std::uniform_real_distribution<double> u(-0.5, 3.5);
  for (int k : {1, 2, 3, 5}) {
    const Model m = make_model(metrics, assoc, x, {0, 1, 0, 1, 0, 1, 0, 1}, 2, k);
    for (int q = 0; q < 200; ++q) {
      const Vector z = vec2(u(rng), u(rng));
      int best = -1, best_count = -1;
      for (int t = 0; t < 3; ++t) {
        std::vector<std::pair<double, int>> d;
        for (int i = 0; i < 8; ++i) {
          const Vector diff = factors[static_cast<std::size_t>(t)] * (x.row(i).transpose() - z);
          d.emplace_back(diff.squaredNorm(), i);
        }
        std::sort(d.begin(), d.end());
        int count = 0;
        for (int j = 0; j < k; ++j) count += assoc[static_cast<std::size_t>(d[static_cast<std::size_t>(j)].second)] == t;
        if (count > best_count) {
          best_count = count;
          best = t;
        }
      }
      EXPECT_EQ(select_metric(m, z), best) << "k=" << k << " q=" << q;
    }
  }
}

TEST(Classifier, IdentityEqualsTextbookKnn) {
  Rng rng(15);
  const RowMatrix x = testing::random_matrix(rng, 80, 3);
  std::vector<int> labels(80);
  std::uniform_int_distribution<int> pick(0, 2);
  for (auto& y : labels) y = pick(rng);
  for (int k : {1, 3, 4, 7}) {
    const Classifier c({Metric::identity(3)}, std::vector<int>(80, 0), {x, labels}, k, 3);
    const RowMatrix q = testing::random_matrix(rng, 100, 3);
    const auto batch = c.predict_batch(q);
    for (Index i = 0; i < 100; ++i) {
      const auto nn = brute_knn(x, q.row(i).transpose(), k);
      std::vector<int> counts(3, 0);
      for (Index j : nn) ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])];
      const int top = *std::max_element(counts.begin(), counts.end());
      int want = -1;
      for (Index j : nn) {
        if (counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] == top) {
          want = labels[static_cast<std::size_t>(j)];
          break;
        }
      }
      EXPECT_EQ(batch[static_cast<std::size_t>(i)].label, want);
      EXPECT_EQ(batch[static_cast<std::size_t>(i)].neighbor_ids, nn);
    }
  }
}

TEST(Classifier, SerialAndParallelBatchesAgree) {
  Rng rng(16);
  const RowMatrix x = testing::random_matrix(rng, 50, 2);
  std::vector<int> labels(50), assoc(50);
  for (int i = 0; i < 50; ++i) {
    labels[static_cast<std::size_t>(i)] = i % 2;
    assoc[static_cast<std::size_t>(i)] = i % 3;
  }
  const Classifier c({Metric::identity(2), Metric(testing::random_matrix(rng, 2, 2)),
                      Metric(testing::random_matrix(rng, 1, 2))},
                     assoc, {x, labels}, 3, 2);
  const RowMatrix q = testing::random_matrix(rng, 40, 2);
  const auto a = c.predict_batch(q, Exec::Serial);
  const auto b = c.predict_batch(q, Exec::Parallel);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].label, b[i].label);
    EXPECT_EQ(a[i].chosen_metric, b[i].chosen_metric);
    EXPECT_EQ(a[i].neighbor_ids, b[i].neighbor_ids);
    EXPECT_EQ(a[i].label, c.predict(q.row(static_cast<Index>(i)).transpose()).label);
  }
}

Dataset as_dataset(const RowMatrix& x, std::vector<int> labels, int classes) {
  Dataset d;
  d.instances = x;
  d.labels = std::move(labels);
  for (int c = 0; c < classes; ++c) d.class_names.push_back("c" + std::to_string(c));
  return d;
}

TEST(Evaluate, AllRightAllWrongEmpty) {
  const RowMatrix x = points({{0, 0}, {10, 10}});
  const Model m = make_model({Metric::identity(2)}, {0, 0}, x, {0, 1}, 2, 1);
  EXPECT_EQ(evaluate(m, as_dataset(x, {0, 1}, 2)), 0.0);
  EXPECT_EQ(evaluate(m, as_dataset(x, {1, 0}, 2)), 1.0);
  EXPECT_EQ(evaluate(m, as_dataset(x, {0, -1}, 2)), 0.5);
  EXPECT_THROW(evaluate(m, as_dataset(RowMatrix(0, 2), {}, 2)), std::invalid_argument);
  EXPECT_THROW(evaluate(m, as_dataset(RowMatrix::Zero(1, 3), {0}, 2)), std::invalid_argument);
}

TEST(Evaluate, ScalingAndOrderInvariance) {
  Rng rng(17);
  const RowMatrix x = testing::random_matrix(rng, 60, 3);
  std::vector<int> labels(60), assoc(60);
  for (int i = 0; i < 60; ++i) {
    labels[static_cast<std::size_t>(i)] = (x(i, 0) + 0.3 * x(i, 2) > 0) ? 1 : 0;
    assoc[static_cast<std::size_t>(i)] = i % 2;
  }
  const Metric m0(testing::random_matrix(rng, 3, 3));
  const Metric m1(testing::random_matrix(rng, 2, 3));
  const Model model = make_model({m0, m1}, assoc, x, labels, 2, 3);
  const Model scaled = make_model({m0.scaled(4.5), m1.scaled(4.5)}, assoc, x, labels, 2, 3);

  const RowMatrix q = testing::random_matrix(rng, 50, 3);
  std::vector<int> ql(50);
  for (int i = 0; i < 50; ++i) ql[static_cast<std::size_t>(i)] = i % 2;
  for (Index i = 0; i < 50; ++i) {
    const Prediction a = predict(model, q.row(i).transpose());
    const Prediction b = predict(scaled, q.row(i).transpose());
    EXPECT_EQ(a.label, b.label);
    EXPECT_EQ(a.chosen_metric, b.chosen_metric);
  }

  const Dataset test = as_dataset(q, ql, 2);
  std::vector<Index> perm(50);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  EXPECT_EQ(evaluate(model, test), evaluate(model, test.subset(perm)));
}

TEST(Model, ValidateCatchesInconsistency) {
  Model m = make_model({Metric::identity(2)}, {0, 0}, points({{0, 0}, {1, 1}}), {0, 1}, 2, 1);
  EXPECT_NO_THROW(m.validate());
  m.k = 3;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m.k = 1;
  m.train.labels = {0, 2};
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace cflml
