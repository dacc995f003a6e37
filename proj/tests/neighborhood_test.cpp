#include "cflml/neighborhood.hpp"

#include "fixtures.hpp"
#include "scalar_oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cflml {
namespace {

TrainingSet line(std::initializer_list<double> xs, std::vector<int> labels) {
  TrainingSet t;
  t.x.resize(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double v : xs) t.x(i++, 0) = v;
  t.labels = std::move(labels);
  return t;
}

std::vector<Index> row(const OmegaCache& o, Index i) {
  const auto s = o.of(i);
  return {s.begin(), s.end()};
}

TEST(Omega, CollinearOrdering) {
  const TrainingSet t = line({0, 1, 3}, {0, 0, 0});
  for (Exec exec : {Exec::Serial, Exec::Parallel}) {
    const OmegaCache o = build_omega(t.x, Metric::identity(1), 2, exec);
    EXPECT_EQ(row(o, 0), (std::vector<Index>{1, 2}));
    EXPECT_EQ(row(o, 1), (std::vector<Index>{0, 2}));
    EXPECT_EQ(row(o, 2), (std::vector<Index>{1, 0}));
  }
}

TEST(Omega, SaturatesAtAllOthers) {
  const TrainingSet t = line({0, 1, 3, 7}, {0, 0, 0, 0});
  const OmegaCache o = build_omega(t.x, Metric::identity(1), 50);
  EXPECT_EQ(o.capacity, 3);
  for (Index i = 0; i < 4; ++i) {
    auto r = row(o, i);
    EXPECT_EQ(std::find(r.begin(), r.end(), i), r.end());
    std::sort(r.begin(), r.end());
    EXPECT_EQ(std::adjacent_find(r.begin(), r.end()), r.end());
  }
}

TEST(Omega, DistanceTiesGoToSmallerIndex) {
  const TrainingSet t = line({0, 1, -1, 2, -2}, {0, 0, 0, 0, 0});
  const OmegaCache o = build_omega(t.x, Metric::identity(1), 4);
  EXPECT_EQ(row(o, 0), (std::vector<Index>{1, 2, 3, 4}));
}

TEST(Omega, MatchesBruteForce) {
  testing::Rng rng(8);
  const RowMatrix x = testing::random_matrix(rng, 50, 3);
  for (Exec exec : {Exec::Serial, Exec::Parallel}) {
    const OmegaCache o = build_omega(x, Metric::identity(3), 10, exec);
    for (Index i = 0; i < 50; ++i) {
      std::vector<std::pair<double, Index>> all;
      for (Index j = 0; j < 50; ++j) {
        if (j != i) all.emplace_back((x.row(i) - x.row(j)).squaredNorm(), j);
      }
      std::sort(all.begin(), all.end());
      std::vector<Index> expect;
      for (int t = 0; t < 10; ++t) expect.push_back(all[static_cast<std::size_t>(t)].second);
      EXPECT_EQ(row(o, i), expect);
    }
  }
}

TEST(Omega, DefaultCapacity) {
  EXPECT_EQ(default_omega_capacity(1000, 3), 50);
  EXPECT_EQ(default_omega_capacity(1000, 20), 100);
  EXPECT_EQ(default_omega_capacity(30, 3), 29);
}

TEST(Omega, RejectsDegenerateRequests) {
  const TrainingSet t = line({0, 1}, {0, 0});
  EXPECT_THROW(build_omega(t.x, Metric::identity(1), 0), std::invalid_argument);
  EXPECT_THROW(build_omega(t.x.topRows(1), Metric::identity(1), 1), std::invalid_argument);
}

// One instance with a hand-made candidate list.
OmegaCache hand_omega(Index capacity, std::vector<Index> flat) { return OmegaCache{capacity, std::move(flat)}; }

TEST(Radius, AveragesSameClassDistances) {
  // Instance 0 (class 0) sees 1 (same, d=1), 2 (other, d=0.5), 3 (same, d=3).
  const OmegaCache o = hand_omega(3, {1, 2, 3});
  const std::vector<double> d2{1.0, 0.25, 9.0};
  const std::vector<int> labels{0, 0, 1, 0};
  EXPECT_DOUBLE_EQ(*raw_neighbor_radius(0, 2, o, d2, labels), 2.0);
  EXPECT_DOUBLE_EQ(*raw_neighbor_radius(0, 5, o, d2, labels), 2.0);
  EXPECT_DOUBLE_EQ(*raw_neighbor_radius(0, 1, o, d2, labels), 1.0);
}

TEST(Radius, SingleNearestNeighbor) {
  const OmegaCache o = hand_omega(2, {1, 2});
  const std::vector<double> d2{0.25, 4.0};
  EXPECT_DOUBLE_EQ(*raw_neighbor_radius(0, 1, o, d2, std::vector<int>{0, 0, 0}), 0.5);
}

TEST(Radius, NoSameClassCandidate) {
  const OmegaCache o = hand_omega(1, {1});
  EXPECT_FALSE(raw_neighbor_radius(0, 1, o, std::vector<double>{1.0}, std::vector<int>{0, 1}));
}

TEST(Radius, DuplicatesAreClampedToTheFloor) {
  const TrainingSet t = line({0, 0, 5, 7}, {0, 0, 1, 1});
  const OmegaCache o = build_omega(t.x, Metric::identity(1), 3);
  const auto d2 = omega_distances(t, o, Metric::identity(1));
  const auto sigma = neighbor_radii(1, o, d2, t.labels);
  EXPECT_DOUBLE_EQ(sigma[0], 1e-8);
  EXPECT_DOUBLE_EQ(sigma[1], 1e-8);
  EXPECT_DOUBLE_EQ(sigma[2], 2.0);
  EXPECT_GT(sigma[0], 0.0);
}

TEST(Radius, AllDuplicatesUseAbsoluteFloor) {
  const TrainingSet t = line({1, 1, 1}, {0, 0, 0});
  const OmegaCache o = build_omega(t.x, Metric::identity(1), 2);
  const auto sigma = neighbor_radii(1, o, omega_distances(t, o, Metric::identity(1)), t.labels);
  for (double s : sigma) EXPECT_DOUBLE_EQ(s, 1e-8);
}

TEST(Radius, SingletonClassTakesMedian) {
  const TrainingSet t = line({0, 1, 3, 10}, {0, 0, 0, 1});
  const OmegaCache o = build_omega(t.x, Metric::identity(1), 3);
  const auto sigma = neighbor_radii(1, o, omega_distances(t, o, Metric::identity(1)), t.labels);
  EXPECT_DOUBLE_EQ(sigma[0], 1.0);
  EXPECT_DOUBLE_EQ(sigma[1], 1.0);
  EXPECT_DOUBLE_EQ(sigma[2], 2.0);
  EXPECT_DOUBLE_EQ(sigma[3], 1.0);
}

TEST(Filter, Values) {
  for (FilterKind k : {FilterKind::Gaussian, FilterKind::Butterworth}) EXPECT_EQ(filter_weight(k, 0.0, 0.7), 1.0);
  EXPECT_NEAR(filter_weight(FilterKind::Gaussian, 4.0, 2.0), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(filter_weight(FilterKind::Gaussian, 4.0, 2.0), 0.60653, 1e-5);
  EXPECT_DOUBLE_EQ(filter_weight(FilterKind::Butterworth, 4.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(filter_weight(FilterKind::Butterworth, 8.0, 2.0), 0.2);
}

TEST(Filter, StrictlyDecreasingOnGrid) {
  for (FilterKind k : {FilterKind::Gaussian, FilterKind::Butterworth}) {
    for (double sigma : {0.1, 1.0, 3.0}) {
      double prev = filter_weight(k, 0.0, sigma);
      for (int g = 1; g <= 200; ++g) {
        const double d2 = 0.01 * g * sigma * sigma;
        const double w = filter_weight(k, d2, sigma);
        EXPECT_LT(w, prev);
        EXPECT_GT(w, 0.0);
        prev = w;
      }
    }
  }
}

TEST(Stats, EqualDistancesGiveHalfAmbiguity) {
  const TrainingSet t = line({0, 1, -1}, {0, 0, 1});
  const OmegaCache o = build_omega(t.x, Metric::identity(1), 2);
  const Neighborhood h = compute_neighborhood(t, o, Metric::identity(1), 1, FilterKind::Gaussian, CenterMode::Self);
  EXPECT_DOUBLE_EQ(h.stats[0].p_same, h.stats[0].p_diff);
  EXPECT_DOUBLE_EQ(h.stats[0].w, 0.5);
  EXPECT_EQ(h.stats[0].p_total, h.stats[0].p_same + h.stats[0].p_diff);
}

TEST(Stats, PureNeighborhoodHasZeroAmbiguity) {
  const TrainingSet t = line({0, 1, 2, 50, 51}, {0, 0, 0, 1, 1});
  const OmegaCache o = build_omega(t.x, Metric::identity(1), 2);
  const Neighborhood h = compute_neighborhood(t, o, Metric::identity(1), 2, FilterKind::Gaussian, CenterMode::Weighted);
  EXPECT_EQ(h.stats[1].w, 0.0);
  EXPECT_EQ(h.stats[1].p_diff, 0.0);
}

TEST(Stats, MatchesScalarOracle) {
  const TrainingSet t{testing::planted_six_points(), testing::planted_six_labels()};
  Matrix l(2, 2);
  l << 1.5, 0.3, -0.2, 0.8;
  for (bool gaussian : {true, false}) {
    for (bool weighted : {true, false}) {
      const auto oracle = testing::scalar_oracle(t.x, t.labels, l, 2, gaussian, weighted);
      const OmegaCache o = build_omega(t.x, Metric::identity(2), 5);
      const Neighborhood h = compute_neighborhood(t, o, Metric(l), 2,
                                                  gaussian ? FilterKind::Gaussian : FilterKind::Butterworth,
                                                  weighted ? CenterMode::Weighted : CenterMode::Self);
      for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_NEAR(h.sigma[i], oracle[i].sigma, 1e-12);
        EXPECT_NEAR(h.stats[i].p_same, oracle[i].p_same, 1e-12);
        EXPECT_NEAR(h.stats[i].p_diff, oracle[i].p_diff, 1e-12);
        EXPECT_NEAR(h.stats[i].w, oracle[i].w, 1e-12);
        for (Index c = 0; c < 2; ++c) EXPECT_NEAR(h.stats[i].center[c], oracle[i].center[static_cast<std::size_t>(c)], 1e-12);
      }
    }
  }
}

TEST(Stats, InvariantsOnRandomData) {
  testing::Rng rng(13);
  const Dataset d = testing::gaussian_blobs(13, 3, 30, 3, 1.5);
  const TrainingSet t{d.instances, d.labels};
  const OmegaCache o = build_omega(t.x, Metric::identity(3), 20);
  const Metric m(testing::random_matrix(rng, 2, 3));
  for (FilterKind kind : {FilterKind::Gaussian, FilterKind::Butterworth}) {
    const Neighborhood h = compute_neighborhood(t, o, m, 3, kind, CenterMode::Weighted);
    for (Index i = 0; i < t.size(); ++i) {
      const InstanceStats& s = h.stats[static_cast<std::size_t>(i)];
      EXPECT_GT(s.sigma, 0.0);
      EXPECT_EQ(s.p_total, s.p_same + s.p_diff);
      EXPECT_GE(s.w, 0.0);
      EXPECT_LE(s.w, 1.0);
      EXPECT_EQ(s.w, s.p_diff / s.p_total);

      const auto members = o.of(i);
      const auto dist = h.distances_of(i);
      bool any_diff = false;
      double weight_sum = 0.0;
      Vector hull = Vector::Zero(3);
      for (std::size_t t2 = 0; t2 < members.size(); ++t2) {
        const Index j = members[t2];
        if (t.labels[static_cast<std::size_t>(j)] != t.labels[static_cast<std::size_t>(i)]) {
          any_diff = true;
          continue;
        }
        const double bary = filter_weight(kind, dist[t2], s.sigma) / s.p_same;
        EXPECT_GE(bary, 0.0);
        weight_sum += bary;
        hull += bary * t.x.row(j).transpose();
      }
      EXPECT_EQ(s.w == 0.0, !any_diff);
      EXPECT_NEAR(weight_sum, 1.0, 1e-12);
      EXPECT_LT((hull - s.center).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Stats, SelfCenterIsTheInstance) {
  const Dataset d = testing::gaussian_blobs(4, 2, 10, 2, 2.0);
  const TrainingSet t{d.instances, d.labels};
  const OmegaCache o = build_omega(t.x, Metric::identity(2), 8);
  const Neighborhood h = compute_neighborhood(t, o, Metric::identity(2), 3, FilterKind::Gaussian, CenterMode::Self);
  for (Index i = 0; i < t.size(); ++i) EXPECT_EQ(h.stats[static_cast<std::size_t>(i)].center, Vector(t.x.row(i).transpose()));
}

}  // namespace
}  // namespace cflml
