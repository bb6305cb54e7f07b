#include "aigforge/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace aigforge {

namespace {

double sq_dist(const double* a, const double* b, size_t dim) {
  double acc = 0.0;
  for (size_t f = 0; f < dim; ++f) {
    const double d = a[f] - b[f];
    acc += d * d;
  }
  return acc;
}

size_t count_distinct(const std::vector<RecipeEmbedding>& points) {
  std::vector<const std::vector<double>*> vecs;
  vecs.reserve(points.size());
  for (const RecipeEmbedding& p : points) vecs.push_back(&p.vec);
  std::sort(vecs.begin(), vecs.end(),
            [](const auto* a, const auto* b) { return *a < *b; });
  vecs.erase(std::unique(vecs.begin(), vecs.end(),
                         [](const auto* a, const auto* b) { return *a == *b; }),
             vecs.end());
  return vecs.size();
}

/*! \brief Assigns every point to its nearest centroid; d2 holds the squared distance. */
void assign_nearest(const std::vector<RecipeEmbedding>& points, const nn::Tensor& centroids,
                    uint32_t k, std::vector<double>& d2, std::vector<uint32_t>& owner) {
  const size_t dim = points.front().vec.size();
  d2.assign(points.size(), 0.0);
  owner.assign(points.size(), 0);
  for (size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    uint32_t arg = 0;
    for (uint32_t c = 0; c < k; ++c) {
      const double d = sq_dist(points[i].vec.data(), &centroids.data[c * dim], dim);
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    d2[i] = best;
    owner[i] = arg;
  }
}

/*! \brief Relocates empty clusters onto far points until every cluster owns a member.
 *
 * Each empty centroid moves to the farthest point whose cluster keeps at least
 * one other member; the anchor had positive distance to every centroid, so the
 * follow-up reassignment hands it to the relocated cluster. Pigeonhole (k does
 * not exceed the point count) keeps a donor cluster available.
 */
void fix_empty_clusters(const std::vector<RecipeEmbedding>& points, nn::Tensor& centroids,
                        uint32_t k, std::vector<double>& d2, std::vector<uint32_t>& owner,
                        std::vector<size_t>& counts) {
  const size_t dim = points.front().vec.size();
  for (uint32_t round = 0; round <= k; ++round) {
    counts.assign(k, 0);
    for (const uint32_t c : owner) ++counts[c];
    bool any_empty = false;
    for (uint32_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      any_empty = true;
      size_t farthest = SIZE_MAX;
      for (size_t i = 0; i < points.size(); ++i)
        if (counts[owner[i]] > 1 && d2[i] > 0.0 &&
            (farthest == SIZE_MAX || d2[i] > d2[farthest]))
          farthest = i;
      if (farthest == SIZE_MAX) throw std::logic_error("kmeans: no relocation anchor");
      --counts[owner[farthest]];
      owner[farthest] = c;
      counts[c] = 1;
      d2[farthest] = 0.0;
      std::copy_n(points[farthest].vec.data(), dim, &centroids.data[c * dim]);
    }
    if (!any_empty) return;
    assign_nearest(points, centroids, k, d2, owner);
  }
  throw std::logic_error("kmeans: empty-cluster relocation did not settle");
}

void seed_kmeanspp(const std::vector<RecipeEmbedding>& points, uint32_t k,
                   std::mt19937_64& rng, nn::Tensor& centroids) {
  const size_t dim = points.front().vec.size();
  std::uniform_int_distribution<size_t> first(0, points.size() - 1);
  std::copy_n(points[first(rng)].vec.data(), dim, centroids.data.begin());
  std::vector<double> d2;
  std::vector<uint32_t> owner;
  for (uint32_t c = 1; c < k; ++c) {
    assign_nearest(points, centroids, c, d2, owner);
    double total = 0.0;
    for (const double d : d2) total += d;
    std::uniform_real_distribution<double> u(0.0, total);
    double mark = u(rng);
    size_t pick = SIZE_MAX;
    for (size_t i = 0; i < points.size(); ++i) {
      if (d2[i] <= 0.0) continue;
      pick = i;
      mark -= d2[i];
      if (mark <= 0.0) break;
    }
    if (pick == SIZE_MAX) throw std::logic_error("kmeans: seeding ran out of mass");
    std::copy_n(points[pick].vec.data(), dim, &centroids.data[c * dim]);
  }
}

void seed_random(const std::vector<RecipeEmbedding>& points, uint32_t k,
                 std::mt19937_64& rng, nn::Tensor& centroids) {
  const size_t dim = points.front().vec.size();
  std::vector<size_t> ids(points.size());
  for (size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  for (uint32_t c = 0; c < k; ++c) {
    std::uniform_int_distribution<size_t> u(c, ids.size() - 1);
    std::swap(ids[c], ids[u(rng)]);
    std::copy_n(points[ids[c]].vec.data(), dim, &centroids.data[c * dim]);
  }
}

}  // namespace

std::vector<RecipeEmbedding> embed_recipes(PredictorModel& model,
                                           const std::vector<Recipe>& recipes) {
  const nn::Tensor h = recipe_embeddings(model, recipes);
  const size_t dim = h.dim(1);
  std::vector<RecipeEmbedding> out(recipes.size());
  for (size_t i = 0; i < recipes.size(); ++i) {
    out[i].recipe = static_cast<uint32_t>(i);
    out[i].vec.assign(&h.data[i * dim], &h.data[i * dim] + dim);
  }
  return out;
}

ClusterResult kmeans(const std::vector<RecipeEmbedding>& points, uint32_t k, uint64_t seed,
                     const KmeansOptions& options) {
  if (points.empty()) throw std::invalid_argument("kmeans: no points");
  if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
  const size_t dim = points.front().vec.size();
  if (dim == 0) throw std::invalid_argument("kmeans: zero-dimensional points");
  for (const RecipeEmbedding& p : points) {
    if (p.vec.size() != dim) throw std::invalid_argument("kmeans: mixed dimensions");
    for (const double v : p.vec)
      if (!std::isfinite(v)) throw std::invalid_argument("kmeans: non-finite embedding");
  }
  if (k > count_distinct(points))
    throw std::invalid_argument("kmeans: k exceeds distinct points");

  std::mt19937_64 rng(seed);
  ClusterResult result;
  result.centroids = nn::Tensor({k, dim});
  if (options.kmeanspp)
    seed_kmeanspp(points, k, rng, result.centroids);
  else
    seed_random(points, k, rng, result.centroids);

  std::vector<double> d2;
  std::vector<uint32_t> owner;
  std::vector<size_t> counts;
  std::vector<double> sums(static_cast<size_t>(k) * dim);
  for (uint32_t iter = 0; iter < options.max_iter; ++iter) {
    assign_nearest(points, result.centroids, k, d2, owner);
    fix_empty_clusters(points, result.centroids, k, d2, owner, counts);

    std::fill(sums.begin(), sums.end(), 0.0);
    for (size_t i = 0; i < points.size(); ++i)
      for (size_t f = 0; f < dim; ++f) sums[owner[i] * dim + f] += points[i].vec[f];
    double shift = 0.0;
    for (uint32_t c = 0; c < k; ++c) {
      double moved = 0.0;
      for (size_t f = 0; f < dim; ++f) {
        const double next = sums[c * dim + f] / static_cast<double>(counts[c]);
        const double d = next - result.centroids.data[c * dim + f];
        moved += d * d;
        result.centroids.data[c * dim + f] = next;
      }
      shift = std::max(shift, std::sqrt(moved));
    }
    if (shift < options.tol) break;
  }

  assign_nearest(points, result.centroids, k, d2, owner);
  fix_empty_clusters(points, result.centroids, k, d2, owner, counts);
  result.assignment = owner;
  result.inertia = 0.0;
  for (const double d : d2) result.inertia += d;

  result.heads.assign(k, UINT32_MAX);
  std::vector<double> head_d2(k, std::numeric_limits<double>::infinity());
  for (size_t i = 0; i < points.size(); ++i) {
    const uint32_t c = owner[i];
    const bool closer = d2[i] < head_d2[c];
    const bool tie_lower = d2[i] == head_d2[c] && points[i].recipe < result.heads[c];
    if (closer || tie_lower) {
      head_d2[c] = d2[i];
      result.heads[c] = points[i].recipe;
    }
  }
  return result;
}

std::vector<uint32_t> select_budget(const std::vector<Recipe>& recipes, SelectionMode mode,
                                    uint32_t n_budget, uint64_t seed, PredictorModel* model) {
  if (n_budget == 0) throw std::invalid_argument("select_budget: empty budget");
  if (n_budget > recipes.size())
    throw std::invalid_argument("select_budget: budget exceeds pool");

  std::vector<uint32_t> ids;
  if (mode == SelectionMode::active) {
    if (model == nullptr)
      throw std::invalid_argument("select_budget: active mode needs a model");
    const ClusterResult clusters = kmeans(embed_recipes(*model, recipes), n_budget, seed);
    ids = clusters.heads;
  } else {
    std::mt19937_64 rng(seed);
    std::vector<uint32_t> pool(recipes.size());
    for (uint32_t i = 0; i < pool.size(); ++i) pool[i] = i;
    for (uint32_t c = 0; c < n_budget; ++c) {
      std::uniform_int_distribution<uint32_t> u(c, static_cast<uint32_t>(pool.size()) - 1);
      std::swap(pool[c], pool[u(rng)]);
    }
    ids.assign(pool.begin(), pool.begin() + n_budget);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace aigforge
