#include "recdiv/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "recdiv/error.hpp"

namespace recdiv {
namespace {

using Engine = std::mt19937_64;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> gaussian_vector(Engine& rng, int dim, double sd) {
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> v(dim);
  for (auto& x : v) x = normal(rng);
  return v;
}

// Index drawn with probability proportional to weights.
std::size_t draw(Engine& rng, const std::vector<double>& weights) {
  std::discrete_distribution<std::size_t> d(weights.begin(), weights.end());
  return d(rng);
}

std::vector<double> zipf_weights(std::size_t n, double exponent) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
  return w;
}

}  // namespace

SyntheticData make_synthetic(const SyntheticSpec& spec) {
  if (spec.users == 0 || spec.items == 0 || spec.genres == 0 || spec.studios == 0 ||
      spec.factors <= 0 || spec.display < 0 || spec.min_train > spec.max_train) {
    throw DataError("invalid synthetic dataset shape");
  }
  Engine rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int f = spec.factors;

  // Popularity rank of each item is a random permutation.
  std::vector<std::size_t> rank(spec.items);
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::shuffle(rank.begin(), rank.end(), rng);
  const auto zipf = zipf_weights(spec.items, spec.popularity_exponent);
  std::vector<double> popularity(spec.items);
  for (std::size_t v = 0; v < spec.items; ++v) popularity[v] = zipf[rank[v]];
  const double log_top = std::log(zipf.front());
  const double log_bottom = std::log(zipf.back());

  const auto genre_weights = zipf_weights(spec.genres, 0.7);
  std::vector<std::vector<double>> genre_embedding;
  for (std::size_t g = 0; g < spec.genres; ++g) {
    genre_embedding.push_back(gaussian_vector(rng, f, 1.0));
  }

  SyntheticData data;
  RecGraph::Builder builder;
  for (std::size_t u = 0; u < spec.users; ++u) {
    builder.add_user("u" + std::to_string(u + 1), spec.display);
  }
  for (std::size_t v = 0; v < spec.items; ++v) builder.add_item("v" + std::to_string(v + 1));

  Grouping::Builder genres(Side::kItem, spec.items);
  Grouping::Builder studios(Side::kItem, spec.items);
  std::vector<std::vector<double>> item_vec(spec.items);
  const auto studio_weights = zipf_weights(spec.studios, 0.5);
  for (std::size_t v = 0; v < spec.items; ++v) {
    std::vector<std::size_t> gs{draw(rng, genre_weights)};
    if (unit(rng) < 0.5) gs.push_back(draw(rng, genre_weights));
    if (unit(rng) < 0.15) gs.push_back(draw(rng, genre_weights));
    item_vec[v] = gaussian_vector(rng, f, 0.5);
    for (std::size_t g : gs) {
      genres.add_membership(v, genres.group("genre" + std::to_string(g + 1)));
      for (int k = 0; k < f; ++k) item_vec[v][k] += genre_embedding[g][k] / std::sqrt(f);
    }
    studios.add_membership(v, studios.group("studio" + std::to_string(draw(rng, studio_weights) + 1)));
  }

  Grouping::Builder demographics(Side::kUser, spec.users);
  Grouping::Builder genders(Side::kUser, spec.users);
  const std::vector<double> age_weights{0.04, 0.18, 0.35, 0.2, 0.08, 0.08, 0.07};
  const auto occupation_weights = zipf_weights(21, 0.6);
  std::vector<std::vector<double>> user_vec(spec.users);
  for (std::size_t u = 0; u < spec.users; ++u) {
    const std::string gender = unit(rng) < 0.72 ? "M" : "F";
    demographics.add_membership(u, demographics.group("age" + std::to_string(draw(rng, age_weights))));
    demographics.add_membership(u, demographics.group("gender" + gender));
    demographics.add_membership(
        u, demographics.group("occupation" + std::to_string(draw(rng, occupation_weights))));
    genders.add_membership(u, genders.group(gender));

    user_vec[u] = gaussian_vector(rng, f, 0.5);
    for (int taste = 0; taste < 2; ++taste) {
      const std::size_t g = draw(rng, genre_weights);
      for (int k = 0; k < f; ++k) user_vec[u][k] += genre_embedding[g][k] / std::sqrt(f);
    }
  }

  // Predicted relevance: logistic of popularity pull plus taste affinity.
  std::normal_distribution<double> noise(0.0, 0.25);
  std::vector<std::pair<double, ItemIndex>> scored(spec.items);
  std::vector<double> train_weight(spec.items);
  std::uniform_int_distribution<std::size_t> train_size(spec.min_train, spec.max_train);
  const std::size_t keep = std::min(spec.candidates_per_user, spec.items);
  for (std::size_t u = 0; u < spec.users; ++u) {
    for (std::size_t v = 0; v < spec.items; ++v) {
      const double pop = (std::log(popularity[v]) - log_bottom) / (log_top - log_bottom);
      const double affinity = dot(user_vec[u], item_vec[v]);
      const double score = spec.popularity_weight * (pop - 0.5) + affinity + noise(rng);
      scored[v] = {1.0 / (1.0 + std::exp(-score)), static_cast<ItemIndex>(v)};
      train_weight[v] = popularity[v] * std::exp(affinity);
    }
    std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                      [](const auto& a, const auto& b) {
                        return a.first > b.first || (a.first == b.first && a.second < b.second);
                      });
    for (std::size_t k = 0; k < keep; ++k) {
      builder.add_edge(static_cast<UserIndex>(u), scored[k].second, scored[k].first);
    }

    // Training history: weighted sampling without replacement, keeping the
    // n largest log(U) / w keys.
    const std::size_t n = std::min(train_size(rng), spec.items);
    std::vector<std::pair<double, ItemIndex>> keys(spec.items);
    for (std::size_t v = 0; v < spec.items; ++v) {
      keys[v] = {std::log(1.0 - unit(rng)) / train_weight[v], static_cast<ItemIndex>(v)};
    }
    std::partial_sort(keys.begin(), keys.begin() + n, keys.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; k < n; ++k) {
      const ItemIndex v = keys[k].second;
      const double affinity = dot(user_vec[u], item_vec[v]);
      const double rating =
          std::clamp(std::round(3.0 + 1.2 * affinity + 2.0 * noise(rng)), 1.0, 5.0);
      data.train.ratings.push_back(
          {"u" + std::to_string(u + 1), "v" + std::to_string(v + 1), rating});
      data.train_interactions.push_back({static_cast<UserIndex>(u), v});
    }
  }

  data.graph = std::move(builder).build();
  data.item_genres = std::move(genres).build();
  data.item_studios = std::move(studios).build();
  data.user_demographics = std::move(demographics).build();
  data.user_genders = std::move(genders).build();
  return data;
}

}  // namespace recdiv
