#include "recdiv/solution.hpp"

#include <algorithm>
#include <string>

#include "recdiv/error.hpp"

namespace recdiv {

Solution::Solution(const RecGraph& graph, const Grouping& user_types,
                   const Grouping& item_categories)
    : graph_(&graph),
      user_types_(&user_types),
      item_categories_(&item_categories),
      selected_(graph.user_count()),
      used_(graph.edge_count(), 0) {
  if (user_types.side() != Side::kUser || item_categories.side() != Side::kItem) {
    throw GroupingError("solution needs a user-side and an item-side grouping");
  }
  validate_grouping(user_types, graph);
  validate_grouping(item_categories, graph);
}

void Solution::add_edge(EdgeIndex e) {
  if (e >= graph_->edge_count()) {
    throw SolutionError("edge index " + std::to_string(e) + " out of range");
  }
  if (used_[e]) throw SolutionError("edge " + std::to_string(e) + " already selected");
  const auto& edge = graph_->edge(e);
  if (user_full(edge.user)) {
    throw SolutionError("user '" + graph_->user(edge.user).id +
                        "' is at its display constraint");
  }
  auto& row = selected_[edge.user];
  row.insert(std::lower_bound(row.begin(), row.end(), e), e);
  used_[e] = 1;
  ++size_;
  for (GroupIndex a : item_categories_->groups_of(edge.item)) ++user_degree_[key(edge.user, a)];
  for (GroupIndex b : user_types_->groups_of(edge.user)) ++item_degree_[key(edge.item, b)];
}

std::vector<EdgeIndex> Solution::edges() const {
  std::vector<EdgeIndex> out;
  out.reserve(size_);
  for (const auto& row : selected_) out.insert(out.end(), row.begin(), row.end());
  return out;
}

int Solution::user_group_degree(UserIndex u, GroupIndex category) const {
  auto it = user_degree_.find(key(u, category));
  return it == user_degree_.end() ? 0 : it->second;
}

int Solution::item_group_degree(ItemIndex v, GroupIndex type) const {
  auto it = item_degree_.find(key(v, type));
  return it == item_degree_.end() ? 0 : it->second;
}

Solution new_solution(const RecGraph& graph, const Grouping& user_types,
                      const Grouping& item_categories) {
  return Solution(graph, user_types, item_categories);
}

double relevance_sum(const Solution& sol) {
  double total = 0.0;
  for (UserIndex u = 0; u < sol.graph().user_count(); ++u) {
    for (EdgeIndex e : sol.selected(u)) total += sol.graph().edge(e).relevance;
  }
  return total;
}

double eval_objective(const Solution& sol, const Grouping& user_types,
                      const Grouping& item_categories, const ThresholdTable& thresholds,
                      const DivParams& params) {
  if (&user_types != &sol.user_types() || &item_categories != &sol.item_categories()) {
    throw GroupingError("objective groupings differ from the ones the solution tracks");
  }
  validate(params);
  validate_thresholds(thresholds, sol.graph(), user_types, item_categories);

  std::int64_t tudiv = 0;
  for (const auto& [k, degree] : sol.user_group_degrees()) {
    tudiv += std::min(thresholds.user_category.get(Solution::key_entity(k),
                                                   Solution::key_group(k)),
                      degree);
  }
  std::int64_t tidiv = 0;
  for (const auto& [k, degree] : sol.item_group_degrees()) {
    tidiv += std::min(
        thresholds.item_type.get(Solution::key_entity(k), Solution::key_group(k)), degree);
  }
  return params.beta * static_cast<double>(tudiv) + params.mu * static_cast<double>(tidiv) +
         relevance_sum(sol);
}

RankedLists rank_by_relevance(const Solution& sol) {
  const auto& graph = sol.graph();
  RankedLists out;
  out.lists.resize(graph.user_count());
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    auto& list = out.lists[u];
    for (EdgeIndex e : sol.selected(u)) list.push_back({e, graph.edge(e).relevance});
    std::stable_sort(list.begin(), list.end(), [](const RankedEntry& a, const RankedEntry& b) {
      return a.score > b.score;
    });
  }
  return out;
}

RankedLists truncate(const RankedLists& ranked, std::size_t k) {
  RankedLists out = ranked;
  if (k == 0) return out;
  for (auto& list : out.lists) {
    if (list.size() > k) list.resize(k);
  }
  return out;
}

Solution to_solution(const RankedLists& ranked, const RecGraph& graph,
                     const Grouping& user_types, const Grouping& item_categories) {
  Solution sol(graph, user_types, item_categories);
  if (ranked.lists.size() != graph.user_count()) {
    throw SolutionError("ranked lists do not cover every user of the graph");
  }
  for (UserIndex u = 0; u < ranked.lists.size(); ++u) {
    for (const auto& entry : ranked.lists[u]) {
      if (entry.edge >= graph.edge_count() || graph.edge(entry.edge).user != u) {
        throw SolutionError("ranked list entry is not a candidate edge of its user");
      }
      sol.add_edge(entry.edge);
    }
  }
  return sol;
}

}  // namespace recdiv
