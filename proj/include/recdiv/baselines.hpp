#pragma once

#include "recdiv/graph.hpp"
#include "recdiv/metrics.hpp"
#include "recdiv/solution.hpp"

namespace recdiv {

// Each user's candidates by relevance descending, cut at c_i. Ties go to the
// lower edge index.
RankedLists top_k(const RecGraph& graph);

// Maximal marginal relevance. The first pick is the most relevant candidate;
// later picks maximize lambda * rel + (1 - lambda) * (min category distance
// to the items already picked). Throws DataError unless lambda is in [0, 1].
RankedLists mmr(const RecGraph& graph, const Grouping& item_categories, double lambda);

// Explicit query-aspect diversification with categories as aspects. Picks
// maximize lambda * rel + (1 - lambda) * sum_a p(a) rel_a(v) prod_s (1 -
// rel_a(s)), where rel_a is the intent profile's normalized relevance masked
// to category a and s ranges over the items already picked.
RankedLists xquad(const RecGraph& graph, const Grouping& item_categories,
                  const IntentProfile& intent, double lambda);

}  // namespace recdiv
