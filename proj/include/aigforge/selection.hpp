/*! \file selection.hpp
 *  \brief Budgeted recipe selection: recipe embeddings, k-means, cluster heads
 */

#pragma once

#include <cstdint>
#include <vector>

#include "aigforge/nn.hpp"
#include "aigforge/predictor.hpp"
#include "aigforge/recipe.hpp"

namespace aigforge {

/*! \brief One recipe's position in the predictor's recipe-embedding space. */
struct RecipeEmbedding {
  uint32_t recipe{0};
  std::vector<double> vec;
};

/*! \brief Outcome of k-means over recipe embeddings.
 *
 * Heads are input members, not synthetic centroids: the head of a cluster is
 * the member recipe nearest its centroid, ties broken by lowest recipe id.
 */
struct ClusterResult {
  nn::Tensor centroids;
  std::vector<uint32_t> assignment;
  std::vector<uint32_t> heads;
  double inertia{0.0};
};

struct KmeansOptions {
  uint32_t max_iter{300};
  double tol{1e-6};
  /*! \brief k-means++ seeding by default; plain random seeding for ablation. */
  bool kmeanspp{true};
};

/*! \brief Embeds recipes through the model's recipe path (eval mode).
 *
 * Embedding i carries recipe id i. Deterministic for a fixed model.
 */
std::vector<RecipeEmbedding> embed_recipes(PredictorModel& model,
                                           const std::vector<Recipe>& recipes);

/*! \brief Lloyd's k-means with seeded initialization.
 *
 * Requires k between 1 and the number of distinct points. Iterates until the
 * largest centroid shift drops below tol or max_iter passes; an empty cluster
 * is re-seeded at the point farthest from its nearest centroid. The returned
 * assignment maps each point to its nearest final centroid, and inertia is the
 * summed squared distance under that assignment.
 */
ClusterResult kmeans(const std::vector<RecipeEmbedding>& embeddings, uint32_t k,
                     uint64_t seed, const KmeansOptions& options = {});

enum class SelectionMode : uint8_t {
  active,
  random,
};

/*! \brief Picks n_budget recipe ids from a pool, ascending.
 *
 * Active mode clusters the pool's embeddings into n_budget groups and returns
 * the cluster heads (model required). Random mode samples uniformly without
 * replacement. Both are deterministic given the seed.
 */
std::vector<uint32_t> select_budget(const std::vector<Recipe>& recipes, SelectionMode mode,
                                    uint32_t n_budget, uint64_t seed,
                                    PredictorModel* model = nullptr);

}  // namespace aigforge
