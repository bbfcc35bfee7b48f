#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "recdiv/error.hpp"
#include "recdiv/greedy_diversify.hpp"
#include "recdiv/indexed_heap.hpp"

namespace recdiv {
namespace {

using testing::make_grouping;
using testing::ThreeItems;

TEST(IndexedMaxHeap, OrdersByKeyThenId) {
  auto h = IndexedMaxHeap<double>::from_keys({1.0, 3.0, 3.0, 2.0});
  EXPECT_EQ(h.top(), 1u);
  h.decrease_key(1, 0.5);
  EXPECT_EQ(h.top(), 2u);
  h.pop();
  EXPECT_FALSE(h.contains(2));
  EXPECT_EQ(h.top(), 3u);
  h.pop();
  h.pop();
  EXPECT_EQ(h.top(), 1u);
  h.pop();
  EXPECT_TRUE(h.empty());
  h.push(2, 7.0);
  EXPECT_EQ(h.top_key(), 7.0);
}

TEST(IndexedMaxHeap, RandomAgainstSortedScan) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 1 + rng() % 40;
    std::vector<double> keys(n);
    for (auto& k : keys) k = static_cast<double>(rng() % 6);
    auto h = IndexedMaxHeap<double>::from_keys(keys);
    std::vector<bool> alive(n, true);
    for (std::size_t step = 0; step < n; ++step) {
      if (rng() % 2 == 0) {
        const std::uint32_t id = static_cast<std::uint32_t>(rng() % n);
        if (alive[id]) {
          keys[id] -= static_cast<double>(rng() % 3);
          h.decrease_key(id, keys[id]);
        }
      }
      std::uint32_t best = 0;
      bool found = false;
      for (std::uint32_t i = 0; i < n; ++i) {
        if (alive[i] && (!found || keys[i] > keys[best])) {
          best = i;
          found = true;
        }
      }
      ASSERT_EQ(h.top(), best);
      alive[best] = false;
      h.pop();
    }
  }
}

TEST(Greedy, HandTraceOfThreeItems) {
  ThreeItems f;
  const auto r = greedy_solve_detailed(f.graph, f.types, f.cats, f.thresholds, {1.0, 0.0});
  EXPECT_EQ(r.selection_order, (std::vector<EdgeIndex>{0, 2}));
  // (u1,A), (v1,T), (u1,B), (v3,T)
  EXPECT_EQ(r.stats.saturation_events, 4u);
  EXPECT_LE(r.stats.decrease_keys, r.stats.decrease_key_bound);
}

TEST(Greedy, InitialKeysAndSaturationDrop) {
  ThreeItems f;
  Solution sol(f.graph, f.types, f.cats);
  const DivParams p{1.0, 0.0};
  EXPECT_DOUBLE_EQ(marginal_gain(sol, 0, f.thresholds, p), 1.9);
  EXPECT_DOUBLE_EQ(marginal_gain(sol, 1, f.thresholds, p), 1.8);
  EXPECT_DOUBLE_EQ(marginal_gain(sol, 2, f.thresholds, p), 1.1);
  sol.add_edge(0);
  EXPECT_DOUBLE_EQ(marginal_gain(sol, 1, f.thresholds, p), 0.8);
  EXPECT_THROW(marginal_gain(sol, 0, f.thresholds, p), SolutionError);
}

TEST(Greedy, ZeroParamsIsTopByRelevance) {
  RecGraph::Builder b;
  b.add_user("u", 2);
  for (const char* id : {"a", "b", "c", "d"}) b.add_item(id);
  b.add_edge(0, 0, 0.3);
  b.add_edge(0, 1, 0.7);
  b.add_edge(0, 2, 0.3);
  b.add_edge(0, 3, 0.7);
  const RecGraph g = std::move(b).build();
  const Grouping t = make_grouping(Side::kUser, {{"T"}});
  const Grouping c = make_grouping(Side::kItem, {{"A"}, {"A"}, {"B"}, {"B"}});
  const auto r = greedy_solve_detailed(g, t, c, unit_thresholds(g, t, c), {0.0, 0.0});
  EXPECT_EQ(r.selection_order, (std::vector<EdgeIndex>{1, 3}));
}

TEST(Greedy, OverlappingCategoriesPreferWiderItem) {
  RecGraph::Builder b;
  b.add_user("u", 1);
  b.add_item("v1");
  b.add_item("v2");
  b.add_edge(0, 0, 0.1);
  b.add_edge(0, 1, 0.5);
  const RecGraph g = std::move(b).build();
  const Grouping t = make_grouping(Side::kUser, {{"T"}});
  const Grouping c = make_grouping(Side::kItem, {{"A", "B"}, {"A"}});
  ThresholdTable th(1, 2);
  th.user_category.set(0, *c.find_group("A"), 1);
  th.user_category.set(0, *c.find_group("B"), 1);
  Solution empty(g, t, c);
  EXPECT_DOUBLE_EQ(marginal_gain(empty, 0, th, {1.0, 0.0}), 2.1);
  EXPECT_DOUBLE_EQ(marginal_gain(empty, 1, th, {1.0, 0.0}), 1.5);
  const Solution sol = greedy_solve(g, t, c, th, {1.0, 0.0});
  EXPECT_TRUE(sol.contains(0));
  EXPECT_EQ(sol.size(), 1u);
}

TEST(MarginalGain, HandValue) {
  RecGraph::Builder b;
  b.add_user("u", 1);
  b.add_item("v");
  b.add_edge(0, 0, 0.3);
  const RecGraph g = std::move(b).build();
  const Grouping t = make_grouping(Side::kUser, {{"X"}});
  const Grouping c = make_grouping(Side::kItem, {{"A", "B"}});
  const ThresholdTable th = unit_thresholds(g, t, c);
  Solution sol(g, t, c);
  EXPECT_DOUBLE_EQ(marginal_gain(sol, 0, th, {1.0, 2.0}), 4.3);
  EXPECT_DOUBLE_EQ(marginal_gain(sol, 0, ThresholdTable(1, 1), {1.0, 2.0}), 0.3);
}

TEST(MarginalGain, SaturatedGroupsLeaveRelevance) {
  ThreeItems f;
  Solution sol(f.graph, f.types, f.cats);
  sol.add_edge(0);  // saturates (u1, A)
  // v2's type threshold is still open, but mu = 0
  EXPECT_DOUBLE_EQ(marginal_gain(sol, 1, f.thresholds, {5.0, 0.0}), 0.8);
}

// Heap greedy against the literal greedy, key verification, the work
// bound, and the 1/2 guarantee.
TEST(GreedyProperty, MatchesNaiveGreedyAndBounds) {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 300; ++round) {
    oracle::InstanceShape shape;
    shape.overlapping = round % 2 == 0;
    shape.grid_relevance = round % 3 == 0;
    const auto inst = oracle::random_instance(rng, shape);
    GreedyOptions opts;
    opts.verify_keys = true;
    const auto r = greedy_solve_detailed(inst.graph, inst.user_types, inst.item_categories,
                                         inst.thresholds, inst.params, opts);
    const auto naive = oracle::naive_greedy(inst.graph, inst.user_types, inst.item_categories,
                                            inst.thresholds, inst.params);
    ASSERT_EQ(r.selection_order, naive) << "round " << round;
    ASSERT_LE(r.stats.decrease_keys, r.stats.decrease_key_bound);
    const auto best = oracle::brute_force_optimum(inst.graph, inst.user_types,
                                                  inst.item_categories, inst.thresholds,
                                                  inst.params);
    const double got = oracle::objective(inst.graph, inst.user_types, inst.item_categories,
                                         inst.thresholds, inst.params, r.solution.edges());
    ASSERT_GE(got + 1e-9, 0.5 * best.objective);
  }
}

// Diminishing returns and monotonicity of TDiv on random nested pairs.
TEST(GreedyProperty, TdivIsMonotoneSubmodular) {
  std::mt19937_64 rng(5);
  int checks = 0;
  while (checks < 2000) {
    oracle::InstanceShape shape;
    shape.overlapping = true;
    shape.max_capacity = 7;
    shape.max_enumeration = 1e30;
    const auto inst = oracle::random_instance(rng, shape);
    const std::size_t m = inst.graph.edge_count();
    if (m < 2) continue;
    std::vector<EdgeIndex> x, y;
    const EdgeIndex e = static_cast<EdgeIndex>(rng() % m);
    for (EdgeIndex f = 0; f < m; ++f) {
      if (f == e) continue;
      const auto roll = rng() % 3;
      if (roll == 0) x.push_back(f);
      if (roll <= 1) y.push_back(f);
    }
    auto tdiv = [&](std::vector<EdgeIndex> s) {
      const auto c = oracle::count(inst.graph, inst.user_types, inst.item_categories,
                                   inst.thresholds, s);
      return inst.params.beta * c.tudiv + inst.params.mu * c.tidiv;
    };
    auto with = [e](std::vector<EdgeIndex> s) {
      s.push_back(e);
      return s;
    };
    ASSERT_GE(tdiv(with(x)) - tdiv(x), tdiv(with(y)) - tdiv(y) - 1e-12);
    ASSERT_GE(tdiv(with(x)), tdiv(x));
    ++checks;
  }
}

TEST(Greedy, RejectsInvalidInputs) {
  ThreeItems f;
  EXPECT_THROW(greedy_solve(f.graph, f.types, f.cats, f.thresholds, {-1.0, 0.0}), DataError);
  const ThresholdTable wrong(2, 3);
  EXPECT_THROW(greedy_solve(f.graph, f.types, f.cats, wrong, {1.0, 0.0}), DataError);
}

}  // namespace
}  // namespace recdiv
