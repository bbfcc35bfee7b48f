#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "recdiv/data.hpp"
#include "recdiv/graph.hpp"
#include "recdiv/metrics.hpp"

namespace recdiv::cli {

struct InputOptions {
  std::string candidates;
  std::size_t top_n = 0;
  int display = 10;
  std::string display_file;
  std::string train;
  std::string user_groups;
  std::string item_groups;
  std::string thresholds;
  std::size_t catalog_size = 0;

  void add_to(CLI::App& app);
};

// Everything loaded from the input options. Solutions keep pointers into
// the groupings, so a Workspace stays where it was built.
class Workspace {
 public:
  explicit Workspace(const InputOptions& opts);
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  RecGraph graph;
  Grouping user_types;
  Grouping item_categories;
  bool has_user_types = false;
  bool has_item_categories = false;
  std::optional<RatingsDataset> train;
  std::vector<Interaction> train_interactions;
  std::optional<ThresholdTable> thresholds;
  std::string threshold_source = "none";  // file, derived or none
  std::optional<IntentProfile> intent;
  std::size_t catalog_size = 0;
  std::size_t skipped_candidates = 0;
  std::size_t unknown_grouped_users = 0;
  std::size_t unknown_grouped_items = 0;
};

}  // namespace recdiv::cli
