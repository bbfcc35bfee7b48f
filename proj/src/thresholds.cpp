#include "recdiv/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "recdiv/error.hpp"

namespace recdiv {

std::vector<int> apportion(std::span<const std::int64_t> counts, std::int64_t total) {
  std::vector<int> out(counts.size(), 0);
  if (total < 0) throw DataError("apportionment target must be nonnegative");
  const std::int64_t sum = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  if (sum == 0 || total == 0) return out;
  std::vector<std::int64_t> remainder(counts.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw DataError("apportionment counts must be nonnegative");
    // exact quota total * counts[i] / sum as floor plus remainder
    const __int128 scaled = static_cast<__int128>(total) * counts[i];
    out[i] = static_cast<int>(scaled / sum);
    remainder[i] = static_cast<std::int64_t>(scaled % sum);
    assigned += out[i];
  }
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return a < b;
  });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[order[k]];
  return out;
}

double mean_categories_per_item(std::span<const Interaction> train,
                                const Grouping& item_categories) {
  std::unordered_set<ItemIndex> items;
  std::int64_t memberships = 0;
  for (const auto& it : train) {
    const auto groups = item_categories.groups_of(it.item);
    if (groups.empty() || !items.insert(it.item).second) continue;
    memberships += static_cast<std::int64_t>(groups.size());
  }
  return items.empty() ? 0.0
                       : static_cast<double>(memberships) / static_cast<double>(items.size());
}

namespace {

// Counts groups of the opposite endpoint per anchor entity and apportions
// target(entity) units over them.
template <typename Anchor, typename GroupsOf, typename Target>
SparseThresholds apportion_rows(std::size_t entity_count, std::span<const Interaction> train,
                                Anchor anchor, GroupsOf groups_of, Target target) {
  std::vector<std::vector<GroupIndex>> hits(entity_count);
  for (const auto& it : train) {
    for (GroupIndex g : groups_of(it)) hits[anchor(it)].push_back(g);
  }
  SparseThresholds table(entity_count);
  std::vector<GroupIndex> groups;
  std::vector<std::int64_t> counts;
  for (std::size_t x = 0; x < entity_count; ++x) {
    auto& h = hits[x];
    if (h.empty()) continue;
    std::sort(h.begin(), h.end());
    groups.clear();
    counts.clear();
    for (std::size_t i = 0; i < h.size();) {
      std::size_t j = i;
      while (j < h.size() && h[j] == h[i]) ++j;
      groups.push_back(h[i]);
      counts.push_back(static_cast<std::int64_t>(j - i));
      i = j;
    }
    const auto values = apportion(counts, target(x));
    for (std::size_t k = 0; k < groups.size(); ++k) table.set(x, groups[k], values[k]);
  }
  return table;
}

}  // namespace

SparseThresholds derive_user_thresholds(const RecGraph& graph,
                                        std::span<const Interaction> train,
                                        const Grouping& item_categories, bool overlapping) {
  validate_grouping(item_categories, graph);
  const double factor = overlapping ? mean_categories_per_item(train, item_categories) : 1.0;
  return apportion_rows(
      graph.user_count(), train, [](const Interaction& it) { return it.user; },
      [&](const Interaction& it) { return item_categories.groups_of(it.item); },
      [&](std::size_t u) {
        return std::llround(static_cast<double>(graph.capacity(static_cast<UserIndex>(u))) *
                            factor);
      });
}

std::int64_t item_threshold_budget(const RecGraph& graph, std::size_t catalog_size) {
  if (catalog_size == 0) return 0;
  return std::llround(0.2 * static_cast<double>(graph.total_capacity()) /
                      static_cast<double>(catalog_size));
}

SparseThresholds derive_item_thresholds(const RecGraph& graph,
                                        std::span<const Interaction> train,
                                        const Grouping& user_types, std::size_t catalog_size) {
  validate_grouping(user_types, graph);
  const std::int64_t budget = item_threshold_budget(graph, catalog_size);
  return apportion_rows(
      graph.item_count(), train, [](const Interaction& it) { return it.item; },
      [&](const Interaction& it) { return user_types.groups_of(it.user); },
      [&](std::size_t) { return budget; });
}

ThresholdTable derive_thresholds(const RecGraph& graph, std::span<const Interaction> train,
                                 const Grouping& user_types, const Grouping& item_categories,
                                 std::size_t catalog_size) {
  ThresholdTable table;
  table.user_category =
      derive_user_thresholds(graph, train, item_categories, !item_categories.is_disjoint());
  table.item_type = derive_item_thresholds(graph, train, user_types, catalog_size);
  return table;
}

std::vector<std::vector<double>> training_category_counts(const RecGraph& graph,
                                                          std::span<const Interaction> train,
                                                          const Grouping& item_categories) {
  std::vector<std::vector<double>> counts(graph.user_count(),
                                          std::vector<double>(item_categories.group_count(), 0.0));
  for (const auto& it : train) {
    for (GroupIndex a : item_categories.groups_of(it.item)) counts[it.user][a] += 1.0;
  }
  return counts;
}

}  // namespace recdiv
