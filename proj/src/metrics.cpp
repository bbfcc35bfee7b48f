#include "recdiv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "json.hpp"

#include "recdiv/error.hpp"
#include "recdiv/format.hpp"

namespace recdiv {
namespace {

std::uint64_t pack(std::uint32_t entity, GroupIndex group) {
  return (static_cast<std::uint64_t>(entity) << 32) | group;
}

// Sorted multiset of (user, category) keys, one per selected edge and
// category of its item.
std::vector<std::uint64_t> user_category_hits(const Solution& sol,
                                              const Grouping& item_categories) {
  const auto& graph = sol.graph();
  std::vector<std::uint64_t> keys;
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    for (EdgeIndex e : sol.selected(u)) {
      for (GroupIndex a : item_categories.groups_of(graph.edge(e).item)) keys.push_back(pack(u, a));
    }
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<std::uint64_t> item_type_hits(const Solution& sol, const Grouping& user_types) {
  const auto& graph = sol.graph();
  std::vector<std::uint64_t> keys;
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    for (EdgeIndex e : sol.selected(u)) {
      for (GroupIndex b : user_types.groups_of(u)) keys.push_back(pack(graph.edge(e).item, b));
    }
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

// Calls f(key, count) for each run of equal keys.
template <typename F>
void for_each_run(const std::vector<std::uint64_t>& keys, F f) {
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    f(keys[i], static_cast<std::int64_t>(j - i));
    i = j;
  }
}

double thresholded(const std::vector<std::uint64_t>& keys, const SparseThresholds& table) {
  std::int64_t total = 0;
  for_each_run(keys, [&](std::uint64_t key, std::int64_t count) {
    const auto entity = static_cast<std::size_t>(key >> 32);
    const auto group = static_cast<GroupIndex>(key & 0xffffffffu);
    total += std::min<std::int64_t>(table.get(entity, group), count);
  });
  return static_cast<double>(total);
}

double distinct(const std::vector<std::uint64_t>& keys) {
  std::int64_t total = 0;
  for_each_run(keys, [&](std::uint64_t, std::int64_t) { ++total; });
  return static_cast<double>(total);
}

std::span<const RankedEntry> head(const std::vector<RankedEntry>& list, std::size_t k) {
  const std::size_t n = (k == 0) ? list.size() : std::min(k, list.size());
  return {list.data(), n};
}

bool in_category(const Grouping& item_categories, ItemIndex v, GroupIndex a) {
  auto groups = item_categories.groups_of(v);
  return std::binary_search(groups.begin(), groups.end(), a);
}

}  // namespace

double tudiv(const Solution& sol, const Grouping& item_categories,
             const ThresholdTable& thresholds) {
  return thresholded(user_category_hits(sol, item_categories), thresholds.user_category);
}

double tidiv(const Solution& sol, const Grouping& user_types,
             const ThresholdTable& thresholds) {
  return thresholded(item_type_hits(sol, user_types), thresholds.item_type);
}

double userdiv(const Solution& sol, const Grouping& item_categories) {
  return distinct(user_category_hits(sol, item_categories));
}

double itemdiv(const Solution& sol, const Grouping& user_types) {
  return distinct(item_type_hits(sol, user_types));
}

double tdiv(const Solution& sol, const Grouping& user_types, const Grouping& item_categories,
            const ThresholdTable& thresholds, const DivParams& params) {
  return params.beta * tudiv(sol, item_categories, thresholds) +
         params.mu * tidiv(sol, user_types, thresholds);
}

double div_edgewise(const Solution& sol, const Grouping& user_types,
                    const Grouping& item_categories, const DivParams& params) {
  if (!user_types.is_disjoint() || !item_categories.is_disjoint()) {
    throw GroupingError("edge-wise diversity needs disjoint types and categories");
  }
  const auto& graph = sol.graph();
  std::unordered_map<std::uint64_t, std::int64_t> user_degree;
  std::unordered_map<std::uint64_t, std::int64_t> item_degree;
  for_each_run(user_category_hits(sol, item_categories),
               [&](std::uint64_t k, std::int64_t c) { user_degree[k] = c; });
  for_each_run(item_type_hits(sol, user_types),
               [&](std::uint64_t k, std::int64_t c) { item_degree[k] = c; });

  double total = 0.0;
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    for (EdgeIndex e : sol.selected(u)) {
      const ItemIndex v = graph.edge(e).item;
      for (GroupIndex a : item_categories.groups_of(v)) {
        total += params.beta / static_cast<double>(user_degree.at(pack(u, a)));
      }
      for (GroupIndex b : user_types.groups_of(u)) {
        total += params.mu / static_cast<double>(item_degree.at(pack(v, b)));
      }
    }
  }
  return total;
}

double category_distance(const Grouping& item_categories, ItemIndex a, ItemIndex b) {
  auto ga = item_categories.groups_of(a);
  auto gb = item_categories.groups_of(b);
  if (ga.empty() || gb.empty()) return 1.0;
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < ga.size() && j < gb.size();) {
    if (ga[i] == gb[j]) {
      ++common;
      ++i;
      ++j;
    } else if (ga[i] < gb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const double cosine = static_cast<double>(common) /
                        std::sqrt(static_cast<double>(ga.size()) * static_cast<double>(gb.size()));
  return 1.0 - cosine;
}

double ild(const RecGraph& graph, const RankedLists& ranked,
           const Grouping& item_categories, std::size_t k) {
  double total = 0.0;
  std::size_t users = 0;
  for (const auto& full : ranked.lists) {
    auto list = head(full, k);
    if (list.empty()) continue;
    ++users;
    const std::size_t c = list.size();
    if (c < 2) continue;
    double pair_sum = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        if (i == j) continue;
        pair_sum += category_distance(item_categories, graph.edge(list[i].edge).item,
                                      graph.edge(list[j].edge).item);
      }
    }
    total += pair_sum / static_cast<double>(c * (c - 1));
  }
  return users == 0 ? 0.0 : total / static_cast<double>(users);
}

IntentProfile make_intent_profile(const RecGraph& graph,
                                  const std::vector<std::vector<double>>& category_counts) {
  IntentProfile intent;
  intent.user_intents.resize(graph.user_count());
  for (UserIndex u = 0; u < graph.user_count() && u < category_counts.size(); ++u) {
    double total = 0.0;
    for (double c : category_counts[u]) total += c;
    if (total <= 0.0) continue;
    for (GroupIndex a = 0; a < category_counts[u].size(); ++a) {
      if (category_counts[u][a] > 0.0) {
        intent.user_intents[u].push_back({a, category_counts[u][a] / total});
      }
    }
  }
  double lo = 0.0, hi = 0.0;
  if (graph.edge_count() > 0) {
    lo = hi = graph.edge(0).relevance;
    for (const auto& e : graph.edges()) {
      lo = std::min(lo, e.relevance);
      hi = std::max(hi, e.relevance);
    }
  }
  intent.normalized_relevance.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) {
    double value = 0.0;
    if (hi > lo) {
      value = (e.relevance - lo) / (hi - lo);
    } else {
      value = hi > 0.0 ? 1.0 : 0.0;
    }
    intent.normalized_relevance.push_back(value);
  }
  return intent;
}

void validate(const IntentProfile& intent, const RecGraph& graph) {
  if (intent.user_intents.size() != graph.user_count() ||
      intent.normalized_relevance.size() != graph.edge_count()) {
    throw DataError("intent profile dimensions do not match the graph");
  }
  for (const auto& row : intent.user_intents) {
    if (row.empty()) continue;
    double total = 0.0;
    for (const auto& w : row) total += w.probability;
    if (std::fabs(total - 1.0) > 1e-9) throw DataError("intent probabilities must sum to 1");
  }
  for (double r : intent.normalized_relevance) {
    if (!(r >= 0.0 && r <= 1.0)) throw DataError("normalized relevance outside [0, 1]");
  }
}

double err_ia(const RecGraph& graph, const RankedLists& ranked, const IntentProfile& intent,
              const Grouping& item_categories, std::size_t k) {
  double total = 0.0;
  std::size_t users = 0;
  for (UserIndex u = 0; u < ranked.lists.size(); ++u) {
    auto list = head(ranked.lists[u], k);
    if (list.empty()) continue;
    ++users;
    double user_total = 0.0;
    for (const auto& w : intent.user_intents[u]) {
      double not_satisfied = 1.0;
      double err = 0.0;
      for (std::size_t pos = 0; pos < list.size(); ++pos) {
        const EdgeIndex e = list[pos].edge;
        const double rel = in_category(item_categories, graph.edge(e).item, w.category)
                               ? intent.normalized_relevance[e]
                               : 0.0;
        err += not_satisfied * rel / static_cast<double>(pos + 1);
        not_satisfied *= 1.0 - rel;
      }
      user_total += w.probability * err;
    }
    total += user_total;
  }
  return users == 0 ? 0.0 : total / static_cast<double>(users);
}

double gini_from_degrees(std::vector<double> degrees) {
  std::sort(degrees.begin(), degrees.end());
  const double r = static_cast<double>(degrees.size());
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    total += degrees[i];
    weighted += (r - static_cast<double>(i)) * degrees[i];  // (r + 1 - (i + 1))
  }
  if (total <= 0.0) return 0.0;
  return 1.0 - (r + 1.0 - 2.0 * weighted / total) / r;
}

namespace {

std::vector<double> item_degrees(const Solution& sol, std::size_t catalog_size) {
  const auto& graph = sol.graph();
  if (catalog_size < graph.item_count()) {
    throw DataError("catalog size is smaller than the number of graph items");
  }
  std::vector<double> degrees(catalog_size, 0.0);
  for (UserIndex u = 0; u < graph.user_count(); ++u) {
    for (EdgeIndex e : sol.selected(u)) degrees[graph.edge(e).item] += 1.0;
  }
  return degrees;
}

}  // namespace

double gini(const Solution& sol, std::size_t catalog_size) {
  return gini_from_degrees(item_degrees(sol, catalog_size));
}

double aggregate_diversity(const Solution& sol, std::size_t catalog_size) {
  if (catalog_size == 0) return 0.0;
  const auto degrees = item_degrees(sol, catalog_size);
  const auto hit = std::count_if(degrees.begin(), degrees.end(), [](double d) { return d > 0; });
  return static_cast<double>(hit) / static_cast<double>(catalog_size);
}

double precision(const RecGraph& graph, const RankedLists& ranked, const TestRelevance& test,
                 std::size_t k) {
  double total = 0.0;
  std::size_t test_users = 0;
  for (UserIndex u = 0; u < graph.user_count() && u < test.relevant.size(); ++u) {
    if (!test.relevant[u]) continue;
    std::size_t slots = static_cast<std::size_t>(graph.capacity(u));
    if (k > 0) slots = std::min(slots, k);
    if (slots == 0) continue;
    ++test_users;
    std::size_t hits = 0;
    if (u < ranked.lists.size()) {
      for (const auto& entry : head(ranked.lists[u], k)) {
        hits += test.relevant[u]->count(graph.edge(entry.edge).item);
      }
    }
    total += static_cast<double>(hits) / static_cast<double>(slots);
  }
  if (test_users == 0) throw DataError("precision needs at least one test user");
  return total / static_cast<double>(test_users);
}

const std::vector<std::string>& MetricsReport::field_names() {
  static const std::vector<std::string> names = {
      "precision", "err_ia", "ild",  "tudiv",         "tidiv",         "userdiv",
      "itemdiv",   "div",    "aggregate_diversity", "gini", "relevance_sum"};
  return names;
}

std::optional<double> MetricsReport::field(const std::string& name) const {
  if (name == "precision") return precision;
  if (name == "err_ia") return err_ia;
  if (name == "ild") return ild;
  if (name == "tudiv") return tudiv;
  if (name == "tidiv") return tidiv;
  if (name == "userdiv") return userdiv;
  if (name == "itemdiv") return itemdiv;
  if (name == "div") return div;
  if (name == "aggregate_diversity") return aggregate_diversity;
  if (name == "gini") return gini;
  if (name == "relevance_sum") return relevance_sum;
  throw DataError("unknown metric '" + name + "'");
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["cutoff"] = cutoff;
  for (const auto& name : field_names()) {
    const auto value = field(name);
    if (value) {
      j[name] = *value;
    } else {
      j[name] = nullptr;
    }
  }
  return j.dump(2);
}

std::string MetricsReport::csv_header() const {
  std::string out = "cutoff";
  for (const auto& name : field_names()) out += "," + name;
  return out;
}

std::string MetricsReport::csv_row() const {
  std::string out = std::to_string(cutoff);
  for (const auto& name : field_names()) {
    out += ",";
    if (const auto value = field(name)) {
      out += format_real(*value);
    }
  }
  return out;
}

MetricsReport MetricsReport::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("metrics report is not valid JSON: ") + e.what());
  }
  MetricsReport r;
  r.cutoff = j.value("cutoff", std::size_t{0});
  auto read = [&](const char* name) -> std::optional<double> {
    if (!j.contains(name) || j[name].is_null()) return std::nullopt;
    return j[name].get<double>();
  };
  r.precision = read("precision");
  r.err_ia = read("err_ia");
  r.ild = read("ild");
  r.tudiv = read("tudiv");
  r.tidiv = read("tidiv");
  r.userdiv = read("userdiv");
  r.itemdiv = read("itemdiv");
  r.div = read("div");
  r.aggregate_diversity = read("aggregate_diversity");
  r.gini = read("gini");
  r.relevance_sum = read("relevance_sum");
  return r;
}

MetricsReport evaluate(const RankedLists& ranked, const EvaluationInputs& in) {
  if (in.graph == nullptr) throw DataError("evaluation needs a graph");
  const RecGraph& graph = *in.graph;
  const Grouping no_types = Grouping::empty(Side::kUser, graph.user_count());
  const Grouping no_categories = Grouping::empty(Side::kItem, graph.item_count());
  const Grouping& types = in.user_types ? *in.user_types : no_types;
  const Grouping& categories = in.item_categories ? *in.item_categories : no_categories;
  const std::size_t catalog = std::max(in.catalog_size, graph.item_count());

  MetricsReport report;
  report.cutoff = in.cutoff;
  const RankedLists lists = truncate(ranked, in.cutoff);
  const Solution full = to_solution(lists, graph, types, categories);

  report.relevance_sum = relevance_sum(full);
  report.aggregate_diversity = aggregate_diversity(full, catalog);
  report.gini = gini(full, catalog);
  if (in.test) report.precision = precision(graph, lists, *in.test, in.cutoff);

  // Lists the intent-style metrics look at.
  RankedLists intent_lists = lists;
  if (in.test && in.intent_on_relevant_only) {
    for (UserIndex u = 0; u < intent_lists.lists.size(); ++u) {
      auto& list = intent_lists.lists[u];
      if (u >= in.test->relevant.size() || !in.test->relevant[u]) {
        list.clear();
        continue;
      }
      const auto& relevant = *in.test->relevant[u];
      std::erase_if(list, [&](const RankedEntry& entry) {
        return relevant.count(graph.edge(entry.edge).item) == 0;
      });
    }
  }
  const Solution intent_sol = to_solution(intent_lists, graph, types, categories);

  if (in.item_categories) {
    report.ild = ild(graph, intent_lists, categories, 0);
    report.userdiv = userdiv(intent_sol, categories);
    if (in.intent) report.err_ia = err_ia(graph, intent_lists, *in.intent, categories, 0);
    if (in.thresholds) report.tudiv = tudiv(intent_sol, categories, *in.thresholds);
  }
  if (in.user_types) {
    report.itemdiv = itemdiv(intent_sol, types);
    if (in.thresholds) report.tidiv = tidiv(intent_sol, types, *in.thresholds);
  }
  if (in.user_types && in.item_categories) {
    if (types.is_disjoint() && categories.is_disjoint()) {
      report.div = div_edgewise(intent_sol, types, categories, in.params);
    } else {
      report.div = in.params.beta * *report.userdiv + in.params.mu * *report.itemdiv;
    }
  }
  return report;
}

}  // namespace recdiv
