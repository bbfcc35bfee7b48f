#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "recdiv/graph.hpp"

namespace recdiv {

// A selected subgraph H of a RecGraph. Tracks the group degrees
// delta_i(R_a) and delta_j(L_b) incrementally as edges are added.
//
// The graph and both groupings are held by reference and must outlive the
// Solution.
class Solution {
 public:
  using DegreeMap = std::unordered_map<std::uint64_t, std::int32_t>;

  Solution(const RecGraph& graph, const Grouping& user_types,
           const Grouping& item_categories);

  // Throws SolutionError if the edge is unknown, already selected, or its
  // user is at the display constraint.
  void add_edge(EdgeIndex e);

  bool contains(EdgeIndex e) const { return used_[e] != 0; }
  bool user_full(UserIndex u) const {
    return static_cast<int>(selected_[u].size()) >= graph_->capacity(u);
  }

  // Selected edge indices of one user, ascending.
  std::span<const EdgeIndex> selected(UserIndex u) const { return selected_[u]; }
  std::size_t size() const { return size_; }
  // All selected edges ordered by (user, edge index).
  std::vector<EdgeIndex> edges() const;

  int user_group_degree(UserIndex u, GroupIndex category) const;
  int item_group_degree(ItemIndex v, GroupIndex type) const;
  const DegreeMap& user_group_degrees() const { return user_degree_; }
  const DegreeMap& item_group_degrees() const { return item_degree_; }

  const RecGraph& graph() const { return *graph_; }
  const Grouping& user_types() const { return *user_types_; }
  const Grouping& item_categories() const { return *item_categories_; }

  static std::uint64_t key(std::uint32_t entity, GroupIndex group) {
    return (static_cast<std::uint64_t>(entity) << 32) | group;
  }
  static std::uint32_t key_entity(std::uint64_t key) {
    return static_cast<std::uint32_t>(key >> 32);
  }
  static GroupIndex key_group(std::uint64_t key) {
    return static_cast<GroupIndex>(key & 0xffffffffu);
  }

 private:
  const RecGraph* graph_;
  const Grouping* user_types_;
  const Grouping* item_categories_;
  std::vector<std::vector<EdgeIndex>> selected_;
  std::vector<std::uint8_t> used_;
  std::size_t size_ = 0;
  DegreeMap user_degree_;
  DegreeMap item_degree_;
};

// Empty selection over the graph.
Solution new_solution(const RecGraph& graph, const Grouping& user_types,
                      const Grouping& item_categories);

// rel(H), summed in (user, edge index) order.
double relevance_sum(const Solution& sol);

// beta * TUDiv(H) + mu * TIDiv(H) + rel(H), read from the solution's
// incremental degree maps. Throws GroupingError when the groupings are not
// the ones the solution tracks.
double eval_objective(const Solution& sol, const Grouping& user_types,
                      const Grouping& item_categories, const ThresholdTable& thresholds,
                      const DivParams& params);

struct RankedEntry {
  EdgeIndex edge;
  double score;
};

// Per-user ordered recommendation lists, indexed by user.
struct RankedLists {
  std::vector<std::vector<RankedEntry>> lists;
};

// Orders each user's selected edges by relevance descending, ties by edge
// index. Scores are the relevances.
RankedLists rank_by_relevance(const Solution& sol);

// Keeps the first min(k, length) entries of every list. k == 0 keeps all.
RankedLists truncate(const RankedLists& ranked, std::size_t k);

// Set view of ranked lists. Throws SolutionError if a list violates the
// display constraint or repeats an edge.
Solution to_solution(const RankedLists& ranked, const RecGraph& graph,
                     const Grouping& user_types, const Grouping& item_categories);

}  // namespace recdiv
