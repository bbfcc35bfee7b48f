#include "workspace.hpp"

#include "cli.hpp"
#include "recdiv/thresholds.hpp"

namespace recdiv::cli {

void InputOptions::add_to(CLI::App& app) {
  app.add_option("--candidates", candidates, "Candidate file: user_id, item_id, relevance")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--top-n", top_n, "Keep each user's N most relevant candidates (0 = all)");
  app.add_option("--display", display, "Uniform display constraint c")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--display-file", display_file, "Per-user display constraints")
      ->check(CLI::ExistingFile);
  app.add_option("--train", train, "Training ratings")->check(CLI::ExistingFile);
  app.add_option("--user-groups", user_groups, "User type file")->check(CLI::ExistingFile);
  app.add_option("--item-groups", item_groups, "Item category file")->check(CLI::ExistingFile);
  app.add_option("--thresholds", thresholds, "Threshold file (derived from --train otherwise)")
      ->check(CLI::ExistingFile);
  app.add_option("--catalog-size", catalog_size,
                 "Catalog size for aggregate diversity and Gini (default: candidate items)");
}

Workspace::Workspace(const InputOptions& opts) {
  const DisplayConstraints dc = opts.display_file.empty()
                                    ? DisplayConstraints{opts.display, {}}
                                    : load_display_constraints(opts.display_file, opts.display);
  CandidateLoad load = load_candidates(opts.candidates, opts.top_n, dc);
  graph = std::move(load.graph);
  skipped_candidates = load.skipped_rows;

  if (opts.user_groups.empty()) {
    user_types = Grouping::empty(Side::kUser, graph.user_count());
  } else {
    GroupingLoad g = load_grouping(opts.user_groups, Side::kUser, graph);
    user_types = std::move(g.grouping);
    unknown_grouped_users = g.unknown_entities;
    has_user_types = true;
  }
  if (opts.item_groups.empty()) {
    item_categories = Grouping::empty(Side::kItem, graph.item_count());
  } else {
    GroupingLoad g = load_grouping(opts.item_groups, Side::kItem, graph);
    item_categories = std::move(g.grouping);
    unknown_grouped_items = g.unknown_entities;
    has_item_categories = true;
  }

  catalog_size = opts.catalog_size == 0 ? graph.item_count() : opts.catalog_size;
  if (catalog_size < graph.item_count()) {
    throw UsageError("--catalog-size " + std::to_string(catalog_size) + " is below the " +
                     std::to_string(graph.item_count()) + " candidate items");
  }

  if (!opts.train.empty()) {
    train = load_ratings(opts.train);
    train_interactions = map_interactions(*train, graph);
  }

  if (!opts.thresholds.empty()) {
    thresholds = load_thresholds(opts.thresholds, graph, user_types, item_categories);
    threshold_source = "file";
  } else if (train && (has_user_types || has_item_categories)) {
    thresholds = derive_thresholds(graph, train_interactions, user_types, item_categories,
                                   catalog_size);
    threshold_source = "derived";
  }

  if (train && has_item_categories) {
    intent = make_intent_profile(
        graph, training_category_counts(graph, train_interactions, item_categories));
  }
}

}  // namespace recdiv::cli
