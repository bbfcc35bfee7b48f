#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "recdiv/data.hpp"
#include "recdiv/graph.hpp"

namespace recdiv {

// Shape of a generated ratings-style dataset. Items have a Zipf popularity
// profile and 1 to 3 genres; users prefer a couple of genres and carry an
// age group, a gender and an occupation.
struct SyntheticSpec {
  std::size_t users = 2000;
  std::size_t items = 1500;
  std::size_t candidates_per_user = 250;
  int display = 10;
  std::size_t genres = 18;
  std::size_t studios = 20;
  int factors = 8;
  double popularity_exponent = 0.8;
  double popularity_weight = 2.0;  // pull of popularity on predicted relevance
  std::size_t min_train = 20;
  std::size_t max_train = 120;
  std::uint64_t seed = 1;
};

struct SyntheticData {
  RecGraph graph;
  Grouping item_genres;        // overlapping
  Grouping item_studios;       // disjoint, one studio per item
  Grouping user_demographics;  // overlapping: age, gender and occupation groups
  Grouping user_genders;       // disjoint
  RatingsDataset train;
  std::vector<Interaction> train_interactions;
};

// Deterministic given the SyntheticSpec, seed included.
SyntheticData make_synthetic(const SyntheticSpec& spec);

}  // namespace recdiv
