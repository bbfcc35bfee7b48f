#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "recdiv/graph.hpp"
#include "recdiv/solution.hpp"

namespace recdiv {

// Set-level diversity objectives. All of these recount group degrees from
// the selected edges; they never read the Solution's incremental maps.

// sum over users and categories of min(rho_i(R_a), delta_i(R_a)).
double tudiv(const Solution& sol, const Grouping& item_categories,
             const ThresholdTable& thresholds);
// sum over items and types of min(lambda_j(L_b), delta_j(L_b)).
double tidiv(const Solution& sol, const Grouping& user_types,
             const ThresholdTable& thresholds);
// Number of distinct categories hit per user, summed.
double userdiv(const Solution& sol, const Grouping& item_categories);
// Number of distinct user types hit per item, summed.
double itemdiv(const Solution& sol, const Grouping& user_types);

// beta * tudiv + mu * tidiv.
double tdiv(const Solution& sol, const Grouping& user_types, const Grouping& item_categories,
            const ThresholdTable& thresholds, const DivParams& params);

// Edge-weighted form: sum over selected edges of
// beta / delta_i(cat(v_j)) + mu / delta_j(type(u_i)). Needs single-valued
// cat/type maps; an ungrouped endpoint contributes no term. Throws
// GroupingError for overlapping groupings.
double div_edgewise(const Solution& sol, const Grouping& user_types,
                    const Grouping& item_categories, const DivParams& params);

// 1 - cosine similarity of the binary category vectors of two items; 1 when
// either item has no category.
double category_distance(const Grouping& item_categories, ItemIndex a, ItemIndex b);

// Intra-list distance at cutoff k (0 = no cutoff). Each user contributes the
// mean distance over ordered pairs of its truncated list (0 for lists
// shorter than 2); the result averages over users with a non-empty list.
double ild(const RecGraph& graph, const RankedLists& ranked,
           const Grouping& item_categories, std::size_t k);

// Per-user intent distribution over categories plus a per-candidate-edge
// relevance normalized into [0, 1].
struct IntentProfile {
  struct Weight {
    GroupIndex category;
    double probability;
  };
  std::vector<std::vector<Weight>> user_intents;  // per user
  std::vector<double> normalized_relevance;       // per candidate edge
};

// Normalizes relevance as (r - r_min) / (r_max - r_min) over every candidate
// edge; a zero range maps to 1 (or 0 if all relevances are 0). Intents are
// normalized from the given per-user category counts.
IntentProfile make_intent_profile(const RecGraph& graph,
                                  const std::vector<std::vector<double>>& category_counts);

// Throws DataError if dimensions mismatch, a probability row does not sum to
// 1 within 1e-9, or a normalized relevance falls outside [0, 1].
void validate(const IntentProfile& intent, const RecGraph& graph);

// Intent-aware expected reciprocal rank at cutoff k, averaged over users
// with a non-empty list.
double err_ia(const RecGraph& graph, const RankedLists& ranked, const IntentProfile& intent,
              const Grouping& item_categories, std::size_t k);

// 1 - classical Gini of a degree distribution, in the form
// 1 - (1/r) (r + 1 - 2 sum (r+1-i) d_i / sum d_i) over degrees sorted
// ascending. Larger is more equitable; equal degrees give exactly 1. An
// all-zero distribution returns 0.
double gini_from_degrees(std::vector<double> degrees);

// Recommendation-degree Gini over a catalog of catalog_size items (items
// beyond the graph, or without recommendations, count as degree 0).
double gini(const Solution& sol, std::size_t catalog_size);

// Fraction of the catalog recommended to at least one user.
double aggregate_diversity(const Solution& sol, std::size_t catalog_size);

// Held-out relevant items for the test users; users absent from the map are
// not test users.
struct TestRelevance {
  std::vector<std::optional<std::unordered_set<ItemIndex>>> relevant;  // per user
};

// (1/|L_T|) sum over test users of |N(u) & T(u)| / c_u with c_u the display
// constraint capped at k (k = 0 means no cap). Throws DataError when there
// are no test users.
double precision(const RecGraph& graph, const RankedLists& ranked, const TestRelevance& test,
                 std::size_t k);

struct MetricsReport {
  std::size_t cutoff = 0;
  std::optional<double> precision;
  std::optional<double> err_ia;
  std::optional<double> ild;
  std::optional<double> tudiv;
  std::optional<double> tidiv;
  std::optional<double> userdiv;
  std::optional<double> itemdiv;
  std::optional<double> div;
  std::optional<double> aggregate_diversity;
  std::optional<double> gini;
  std::optional<double> relevance_sum;

  // Field order of the CSV columns and JSON keys.
  static const std::vector<std::string>& field_names();
  std::optional<double> field(const std::string& name) const;
  std::string to_json() const;
  std::string csv_header() const;
  std::string csv_row() const;
  static MetricsReport from_json(const std::string& text);
};

// Inputs for a full report; null pointers mark missing data, whose
// dependent metrics are then reported as absent.
struct EvaluationInputs {
  const RecGraph* graph = nullptr;
  const Grouping* user_types = nullptr;
  const Grouping* item_categories = nullptr;
  const ThresholdTable* thresholds = nullptr;
  const IntentProfile* intent = nullptr;
  const TestRelevance* test = nullptr;
  DivParams params;
  std::size_t catalog_size = 0;
  std::size_t cutoff = 0;
  // Compute ILD, ERR-IA and the group-diversity metrics on lists filtered
  // to held-out relevant items (test users only) when test data is given.
  bool intent_on_relevant_only = true;
};

MetricsReport evaluate(const RankedLists& ranked, const EvaluationInputs& inputs);

}  // namespace recdiv
