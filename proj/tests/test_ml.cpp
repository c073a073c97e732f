#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sbm/ml.hpp"

using namespace sbm;

namespace {
Labeling lab(std::vector<int> v) { return Labeling(std::move(v)); }
std::vector<int> plus_set(const Labeling& x) { return x.community(1); }
}  // namespace

TEST(MlBisection, Examples) {
  const auto two = ml_bisection(Graph(4, {{0, 1}, {2, 3}}));
  EXPECT_EQ(two.best, lab({1, 1, -1, -1}));
  EXPECT_EQ(two.min_cut, 0);
  EXPECT_TRUE(two.unique);

  const auto k4 = ml_bisection(Graph::complete(4));
  EXPECT_EQ(k4.min_cut, 4);
  EXPECT_FALSE(k4.unique);
  EXPECT_EQ(k4.optima_count, 3);
  EXPECT_EQ(k4.best, lab({1, 1, -1, -1}));  // lexicographic tie-break

  const auto path = ml_bisection(Graph(4, {{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_EQ(path.best, lab({1, 1, -1, -1}));
  EXPECT_EQ(path.min_cut, 1);
  EXPECT_TRUE(path.unique);
}

TEST(MlBisection, Preconditions) {
  EXPECT_THROW(ml_bisection(Graph::empty(5)), ValidationError);
  EXPECT_THROW(ml_bisection(Graph::empty(26)), ValidationError);
  EXPECT_NO_THROW(ml_bisection(Graph::empty(2)));
}

TEST(MlBisection, AgreesWithNaiveEnumerator) {
  for (int n : {4, 6, 8, 10, 12})
    for (int t = 0; t < 30; ++t) {
      const auto s = generate_sbm(SbmParams::make(n, 2, 1), derive_seed(n, t));
      const auto r = ml_bisection(s.graph);
      const auto ref = oracle::naive_min_bisection(s.graph);
      EXPECT_EQ(r.min_cut, ref.min_cut);
      EXPECT_EQ(r.optima_count, ref.optima);
      EXPECT_EQ(plus_set(r.best), ref.plus_set);
      EXPECT_EQ(r.min_cut, cut_size(s.graph, r.best));
      EXPECT_EQ(r.unique, r.optima_count == 1);
    }
}

TEST(MajorityFailure, Examples) {
  const auto x = lab({1, 1, 1, -1, -1, -1});
  EXPECT_FALSE(node_majority_failure(Graph::empty(6), x, 0));
  const Graph g(6, {{0, 1}, {0, 3}, {0, 4}, {1, 3}, {1, 2}});
  EXPECT_TRUE(node_majority_failure(g, x, 0));   // 2 cross, 1 own
  EXPECT_FALSE(node_majority_failure(g, x, 1));  // 1 cross, 2 own
  const Graph tie(6, {{2, 0}, {2, 5}});
  EXPECT_FALSE(node_majority_failure(tie, x, 2));
  EXPECT_THROW(node_majority_failure(g, x, 6), ValidationError);
}

TEST(EventDelta, Examples) {
  const Graph tri(6, {{0, 1}, {1, 2}, {0, 2}});
  const std::vector<Vertex> h{0, 1, 2}, none;
  EXPECT_TRUE(event_delta_holds(tri, none, 1));
  EXPECT_FALSE(event_delta_holds(tri, h, 2));
  EXPECT_TRUE(event_delta_holds(tri, h, 3));
}

TEST(EventFH, Examples) {
  // A = {0..3}, B = {4..7}, H = {0, 1}.
  const auto x = lab({1, 1, 1, 1, -1, -1, -1, -1});
  const std::vector<Vertex> h{0, 1};
  EXPECT_FALSE(event_FH_holds(Graph::empty(8), x, h, 0, 1));
  const Graph three_b(8, {{0, 4}, {0, 5}, {0, 6}, {0, 1}});
  EXPECT_TRUE(event_FH_holds(three_b, x, h, 0, 3));  // edge to H itself is ignored
  const Graph plus_a(8, {{0, 4}, {0, 5}, {0, 6}, {0, 2}});
  EXPECT_FALSE(event_FH_holds(plus_a, x, h, 0, 3));
  EXPECT_THROW(event_FH_holds(plus_a, x, h, 2, 3), ValidationError);
}

TEST(Events, DeltaAndFHImplyMajorityFailure) {
  for (int t = 0; t < 300; ++t) {
    const auto s = generate_sbm(SbmParams::make(40, 3, 2), derive_seed(77, t));
    const auto a = s.truth.community(1);
    const std::vector<Vertex> h(a.begin(), a.begin() + 6);
    for (int delta : {1, 2, 3}) {
      if (!event_delta_holds(s.graph, h, delta)) continue;
      for (Vertex j : h)
        if (event_FH_holds(s.graph, s.truth, h, j, delta))
          EXPECT_TRUE(node_majority_failure(s.graph, s.truth, j));
    }
  }
}

TEST(Events, TwoSidedFailureBreaksUniqueness) {
  // 0 in A and 4 in B each have more neighbours across than at home.
  const auto x = lab({1, 1, 1, 1, -1, -1, -1, -1});
  const Graph g(8, {{0, 5}, {0, 6}, {0, 1}, {4, 1}, {4, 2}, {4, 7},
                    {1, 2}, {2, 3}, {1, 3}, {5, 6}, {6, 7}, {5, 7}});
  ASSERT_TRUE(node_majority_failure(g, x, 0));
  ASSERT_TRUE(node_majority_failure(g, x, 4));
  EXPECT_LE(cut_change_after_swap(g, x, 0, 4), 0);
  const auto ml = ml_bisection(g);
  EXPECT_FALSE(ml.unique && same_partition(ml.best, x));
  EXPECT_THROW(cut_change_after_swap(g, x, 0, 1), ValidationError);
}

TEST(Events, SwapChangeMatchesRecount) {
  for (int t = 0; t < 50; ++t) {
    const auto s = generate_sbm(SbmParams::make(12, 4, 2), derive_seed(5, t));
    const auto a = s.truth.community(1), b = s.truth.community(-1);
    const std::vector<Vertex> swap{a[0], b[0]};
    const auto y = s.truth.with_flipped(swap);
    EXPECT_EQ(cut_change_after_swap(s.graph, s.truth, a[0], b[0]),
              cut_size(s.graph, y) - cut_size(s.graph, s.truth));
  }
}

TEST(EventRates, ImplicationAndSignal) {
  const auto same = estimate_event_probabilities(SbmParams::make(16, 4, 4), 200, 3);
  EXPECT_EQ(same.implication_violations, 0);
  EXPECT_TRUE(same.desk_scale_fallback);
  EXPECT_EQ(same.h_size, 4);
  EXPECT_EQ(same.delta, 2);
  ASSERT_TRUE(same.f_rate.has_value());
  EXPECT_GT(same.fa_rate, 0.8);
  EXPECT_GT(*same.f_rate, 0.8);

  // beta = 0 with the largest alpha the model allows at n=16.
  const auto apart = estimate_event_probabilities(SbmParams::make(16, 16 / std::log(16.0), 0), 200, 3);
  EXPECT_LT(apart.fa_rate, 0.05);

  const auto big = estimate_event_probabilities(SbmParams::make(200, 3, 1), 20, 3);
  EXPECT_FALSE(big.desk_scale_fallback);
  EXPECT_FALSE(big.f_rate.has_value());
  EXPECT_EQ(big.implication_violations, 0);
  EXPECT_THROW(estimate_event_probabilities(SbmParams::make(16, 4, 1), 0, 3), ValidationError);
}

TEST(MlSuccess, NondecreasingInAlpha) {
  // alpha is capped at 16 / log 16 ~ 5.77 by p <= 1.
  std::vector<double> rates;
  for (double a : {1.0, 2.0, 4.0, 5.5}) {
    const auto r = estimate_event_probabilities(SbmParams::make(16, a, 1), 200, 9);
    rates.push_back(1 - *r.f_rate);
  }
  for (std::size_t i = 1; i < rates.size(); ++i) {
    const double sd = std::sqrt((rates[i] * (1 - rates[i]) + rates[i - 1] * (1 - rates[i - 1])) / 200);
    EXPECT_GE(rates[i], rates[i - 1] - 2 * sd);
  }
}

TEST(MlSuccess, FailureBelowUnionBound) {
  const auto r = estimate_event_probabilities(SbmParams::make(16, 5.5, 1), 200, 21);
  const double bound = ml_failure_upper_bound(16, 5.5, 1);
  EXPECT_LE(*r.f_rate, bound + 4 * std::sqrt(std::max(bound * (1 - bound), 0.0) / 200) + 1e-12);
}
