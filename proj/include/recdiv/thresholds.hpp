#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "recdiv/data.hpp"
#include "recdiv/graph.hpp"

namespace recdiv {

// Largest-remainder apportionment of `total` units in proportion to
// `counts`. Leftover units go to the largest remainders, ties to the larger
// count, then the lower index. The result sums to `total` unless every
// count is zero, in which case it is all zeros.
std::vector<int> apportion(std::span<const std::int64_t> counts, std::int64_t total);

// Mean number of categories over the distinct trained-on items that have at
// least one category; 0 if there are none.
double mean_categories_per_item(std::span<const Interaction> train,
                                const Grouping& item_categories);

// rho: per user, the categories of its training items (each category of an
// item counts once per interaction) apportioned to round(S) with S = c_i,
// or c_i times mean_categories_per_item when `overlapping`. A user with no
// categorized training items gets no thresholds.
SparseThresholds derive_user_thresholds(const RecGraph& graph,
                                        std::span<const Interaction> train,
                                        const Grouping& item_categories, bool overlapping);

// Budget shared by every item: round(0.2 * sum c_i / catalog_size).
std::int64_t item_threshold_budget(const RecGraph& graph, std::size_t catalog_size);

// lambda: per item, the types of the users who interacted with it in
// training, apportioned to the common budget.
SparseThresholds derive_item_thresholds(const RecGraph& graph,
                                        std::span<const Interaction> train,
                                        const Grouping& user_types, std::size_t catalog_size);

// Both sides; `overlapping` defaults to the category grouping's own flag.
ThresholdTable derive_thresholds(const RecGraph& graph, std::span<const Interaction> train,
                                 const Grouping& user_types, const Grouping& item_categories,
                                 std::size_t catalog_size);

// Per-user training category frequencies, the input of make_intent_profile.
std::vector<std::vector<double>> training_category_counts(const RecGraph& graph,
                                                          std::span<const Interaction> train,
                                                          const Grouping& item_categories);

}  // namespace recdiv
