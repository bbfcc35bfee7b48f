#include "recdiv/greedy_diversify.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "recdiv/error.hpp"
#include "recdiv/indexed_heap.hpp"

namespace recdiv {

double marginal_gain(const Solution& sol, EdgeIndex e, const ThresholdTable& thresholds,
                     const DivParams& params) {
  if (sol.contains(e)) {
    throw SolutionError("marginal gain requested for selected edge " + std::to_string(e));
  }
  const auto& edge = sol.graph().edge(e);
  int open_categories = 0;
  for (GroupIndex a : sol.item_categories().groups_of(edge.item)) {
    if (sol.user_group_degree(edge.user, a) < thresholds.user_category.get(edge.user, a)) {
      ++open_categories;
    }
  }
  int open_types = 0;
  for (GroupIndex b : sol.user_types().groups_of(edge.user)) {
    if (sol.item_group_degree(edge.item, b) < thresholds.item_type.get(edge.item, b)) {
      ++open_types;
    }
  }
  return edge_score(edge.relevance, params.beta, open_categories, params.mu, open_types);
}

namespace {

// Saturation pairs of one side: (user, category) or (item, type). Each pair
// owns the candidate edges it covers; each edge knows the pairs it feeds.
struct PairTable {
  std::vector<int> threshold;
  std::vector<int> degree;
  std::vector<std::size_t> edge_off{0};  // pair -> covered edges
  std::vector<EdgeIndex> edges;
  std::vector<std::size_t> pair_off;     // edge -> pairs
  std::vector<std::uint32_t> pairs;

  std::span<const EdgeIndex> covered(std::uint32_t p) const {
    return {edges.data() + edge_off[p], edge_off[p + 1] - edge_off[p]};
  }
  std::span<const std::uint32_t> of_edge(EdgeIndex e) const {
    return {pairs.data() + pair_off[e], pair_off[e + 1] - pair_off[e]};
  }
};

// For every entity on the anchor side, groups its incident edges by the
// groups of the opposite endpoint.
template <typename Incident, typename GroupsOf, typename Threshold>
PairTable build_pairs(std::size_t entity_count, std::size_t edge_count, Incident incident,
                      GroupsOf groups_of_edge, Threshold threshold_of) {
  PairTable t;
  t.pair_off.assign(edge_count + 1, 0);
  std::vector<std::pair<GroupIndex, EdgeIndex>> scratch;
  for (std::size_t x = 0; x < entity_count; ++x) {
    scratch.clear();
    for (EdgeIndex e : incident(x)) {
      for (GroupIndex g : groups_of_edge(e)) scratch.emplace_back(g, e);
    }
    std::sort(scratch.begin(), scratch.end());
    for (std::size_t i = 0; i < scratch.size();) {
      const GroupIndex g = scratch[i].first;
      t.threshold.push_back(threshold_of(x, g));
      t.degree.push_back(0);
      for (; i < scratch.size() && scratch[i].first == g; ++i) {
        t.edges.push_back(scratch[i].second);
        ++t.pair_off[scratch[i].second + 1];
      }
      t.edge_off.push_back(t.edges.size());
    }
  }
  for (std::size_t e = 0; e < edge_count; ++e) t.pair_off[e + 1] += t.pair_off[e];
  t.pairs.assign(t.pair_off.back(), 0);
  std::vector<std::size_t> cursor(t.pair_off.begin(), t.pair_off.end() - 1);
  for (std::uint32_t p = 0; p + 1 < t.edge_off.size(); ++p) {
    for (EdgeIndex e : t.covered(p)) t.pairs[cursor[e]++] = p;
  }
  return t;
}

// Best remaining edge of a user as seen by the user-level heap. Orders by
// score, then by lower edge index, which reproduces a single heap over all
// edges.
struct UserKey {
  double score;
  EdgeIndex edge;

  bool operator>(const UserKey& o) const {
    return score > o.score || (score == o.score && edge < o.edge);
  }
};

// Unused edges keyed by current marginal score, plus the per-edge count of
// still-open categories and types that the key is derived from. Each user
// owns a heap of its edges; a second heap orders users by their best edge,
// so a user that reaches its display constraint leaves in one step instead
// of having every remaining edge popped.
class EdgePriorityIndex {
 public:
  EdgePriorityIndex(const RecGraph& graph, const Grouping& user_types,
                    const Grouping& item_categories, const ThresholdTable& thresholds,
                    const DivParams& params)
      : graph_(graph),
        params_(params),
        user_pairs_(build_pairs(
            graph.user_count(), graph.edge_count(),
            [&](std::size_t u) { return graph.user_edges(static_cast<UserIndex>(u)); },
            [&](EdgeIndex e) { return item_categories.groups_of(graph.edge(e).item); },
            [&](std::size_t u, GroupIndex a) { return thresholds.user_category.get(u, a); })),
        item_pairs_(build_pairs(
            graph.item_count(), graph.edge_count(),
            [&](std::size_t v) { return graph.item_edges(static_cast<ItemIndex>(v)); },
            [&](EdgeIndex e) { return user_types.groups_of(graph.edge(e).user); },
            [&](std::size_t v, GroupIndex b) { return thresholds.item_type.get(v, b); })),
        open_categories_(graph.edge_count(), 0),
        open_types_(graph.edge_count(), 0),
        local_(graph.edge_count(), 0),
        users_(graph.user_count()) {
    edge_heaps_.reserve(graph.user_count());
    for (UserIndex u = 0; u < graph.user_count(); ++u) {
      const auto edges = graph.user_edges(u);
      std::vector<double> keys(edges.size());
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const EdgeIndex e = edges[i];
        local_[e] = static_cast<std::uint32_t>(i);
        for (auto p : user_pairs_.of_edge(e)) open_categories_[e] += user_pairs_.threshold[p] > 0;
        for (auto p : item_pairs_.of_edge(e)) open_types_[e] += item_pairs_.threshold[p] > 0;
        keys[i] = score(e);
      }
      edge_heaps_.push_back(IndexedMaxHeap<double>::from_keys(std::move(keys)));
      // Users that can take nothing never compete.
      if (graph.capacity(u) > 0 && !edges.empty()) users_.push(u, best_of(u));
    }
  }

  bool empty() const { return users_.empty(); }
  EdgeIndex top() const { return users_.top_key().edge; }
  double top_key() const { return users_.top_key().score; }

  std::size_t decrease_key_bound() const {
    return user_pairs_.edges.size() + item_pairs_.edges.size();
  }

  // Removes the top edge. A user that is now full leaves with all of its
  // remaining edges, which are counted as discarded.
  void pop(bool user_full, GreedyStats& stats) {
    const UserIndex u = users_.top();
    IndexedMaxHeap<double>& heap = edge_heaps_[u];
    heap.pop();
    if (user_full || heap.empty()) {
      stats.discarded += heap.size();
      users_.pop();
      heap = IndexedMaxHeap<double>(0);
    } else {
      users_.decrease_key(u, best_of(u));
    }
  }

  // Records the selection of e and lowers the keys of unused edges in every
  // pair that e saturates.
  void select(EdgeIndex e, GreedyStats& stats) {
    for (auto p : user_pairs_.of_edge(e)) {
      if (++user_pairs_.degree[p] != user_pairs_.threshold[p]) continue;
      ++stats.saturation_events;
      for (EdgeIndex other : user_pairs_.covered(p)) {
        if (!waiting(other)) continue;
        --open_categories_[other];
        lower(other);
        ++stats.decrease_keys;
      }
    }
    for (auto p : item_pairs_.of_edge(e)) {
      if (++item_pairs_.degree[p] != item_pairs_.threshold[p]) continue;
      ++stats.saturation_events;
      for (EdgeIndex other : item_pairs_.covered(p)) {
        if (!waiting(other)) continue;
        --open_types_[other];
        lower(other);
        ++stats.decrease_keys;
      }
    }
  }

 private:
  double score(EdgeIndex e) const {
    return edge_score(graph_.edge(e).relevance, params_.beta, open_categories_[e], params_.mu,
                      open_types_[e]);
  }

  UserKey best_of(UserIndex u) const {
    const auto& heap = edge_heaps_[u];
    return {heap.top_key(), graph_.user_edges(u)[heap.top()]};
  }

  // Still a candidate: not selected and its user has not left.
  bool waiting(EdgeIndex e) const {
    const UserIndex u = graph_.edge(e).user;
    return users_.contains(u) && edge_heaps_[u].contains(local_[e]);
  }

  void lower(EdgeIndex e) {
    const UserIndex u = graph_.edge(e).user;
    IndexedMaxHeap<double>& heap = edge_heaps_[u];
    const bool was_best = heap.top() == local_[e];
    heap.decrease_key(local_[e], score(e));
    if (was_best) users_.decrease_key(u, best_of(u));
  }

  const RecGraph& graph_;
  DivParams params_;
  PairTable user_pairs_;
  PairTable item_pairs_;
  std::vector<int> open_categories_;
  std::vector<int> open_types_;
  std::vector<std::uint32_t> local_;  // position of an edge in its user's edge list
  std::vector<IndexedMaxHeap<double>> edge_heaps_;
  IndexedMaxHeap<UserKey> users_;
};

}  // namespace

GreedyResult greedy_solve_detailed(const RecGraph& graph, const Grouping& user_types,
                                   const Grouping& item_categories,
                                   const ThresholdTable& thresholds, const DivParams& params,
                                   const GreedyOptions& options) {
  validate(params);
  validate_grouping(user_types, graph);
  validate_grouping(item_categories, graph);
  validate_thresholds(thresholds, graph, user_types, item_categories);

  GreedyResult result{Solution(graph, user_types, item_categories), {}, {}};
  Solution& sol = result.solution;
  GreedyStats& stats = result.stats;

  EdgePriorityIndex index(graph, user_types, item_categories, thresholds, params);
  stats.decrease_key_bound = index.decrease_key_bound();

  while (!index.empty()) {
    const EdgeIndex e = index.top();
    const double key = index.top_key();
    ++stats.pops;
    if (options.verify_keys) {
      const double expected = marginal_gain(sol, e, thresholds, params);
      if (expected != key) {
        throw std::logic_error("heap key of edge " + std::to_string(e) +
                               " disagrees with its marginal gain");
      }
    }
    sol.add_edge(e);
    result.selection_order.push_back(e);
    index.pop(sol.user_full(graph.edge(e).user), stats);
    index.select(e, stats);
  }
  return result;
}

Solution greedy_solve(const RecGraph& graph, const Grouping& user_types,
                      const Grouping& item_categories, const ThresholdTable& thresholds,
                      const DivParams& params) {
  return greedy_solve_detailed(graph, user_types, item_categories, thresholds, params)
      .solution;
}

}  // namespace recdiv
