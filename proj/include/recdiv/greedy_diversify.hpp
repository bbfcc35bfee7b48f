#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "recdiv/graph.hpp"
#include "recdiv/solution.hpp"

namespace recdiv {

// Marginal score of an edge: its relevance plus beta per unsaturated
// category of the item and mu per unsaturated type of the user. Every
// caller goes through this one expression so scores compare bit-exactly.
inline double edge_score(double relevance, double beta, int open_categories, double mu,
                         int open_types) {
  return relevance + beta * open_categories + mu * open_types;
}

// Exact marginal gain TDiv(H + e) - TDiv(H) + rel(e) of an unused edge.
// Throws SolutionError if e is already in the solution.
double marginal_gain(const Solution& sol, EdgeIndex e, const ThresholdTable& thresholds,
                     const DivParams& params);

struct GreedyOptions {
  // Recompute marginal_gain from scratch at every selection and compare with
  // the heap key; throws std::logic_error on mismatch.
  bool verify_keys = false;
};

struct GreedyStats {
  std::size_t pops = 0;
  std::size_t discarded = 0;  // unused edges dropped when their user filled up
  std::size_t decrease_keys = 0;
  std::size_t saturation_events = 0;
  // Sum over (user, category) and (item, type) pairs of their incident
  // candidate edges: the ceiling on decrease_keys.
  std::size_t decrease_key_bound = 0;
};

struct GreedyResult {
  Solution solution;
  std::vector<EdgeIndex> selection_order;
  GreedyStats stats;
};

// Greedy maximization of beta * TUDiv + mu * TIDiv + rel under the display
// constraints, for disjoint or overlapping groupings. Runs in
// O((|E| + sum of group incidences) log |E|) using indexed max-heaps (one
// per user plus one over users) whose keys only ever decrease. Ties go to
// the lowest edge index.
GreedyResult greedy_solve_detailed(const RecGraph& graph, const Grouping& user_types,
                                   const Grouping& item_categories,
                                   const ThresholdTable& thresholds, const DivParams& params,
                                   const GreedyOptions& options = {});

Solution greedy_solve(const RecGraph& graph, const Grouping& user_types,
                      const Grouping& item_categories, const ThresholdTable& thresholds,
                      const DivParams& params);

}  // namespace recdiv
