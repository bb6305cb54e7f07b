#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "aigforge/selection.hpp"

using namespace aigforge;

namespace {

std::vector<RecipeEmbedding> make_points(const std::vector<std::vector<double>>& vecs) {
  std::vector<RecipeEmbedding> out(vecs.size());
  for (size_t i = 0; i < vecs.size(); ++i) {
    out[i].recipe = static_cast<uint32_t>(i);
    out[i].vec = vecs[i];
  }
  return out;
}

std::vector<RecipeEmbedding> make_blobs(const std::vector<std::vector<double>>& centers,
                                        size_t per_blob, double spread, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-spread, spread);
  std::vector<std::vector<double>> vecs;
  for (const auto& center : centers)
    for (size_t i = 0; i < per_blob; ++i) {
      std::vector<double> v = center;
      for (double& x : v) x += jitter(rng);
      vecs.push_back(std::move(v));
    }
  return make_points(vecs);
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t f = 0; f < a.size(); ++f) acc += (a[f] - b[f]) * (a[f] - b[f]);
  return acc;
}

double pairwise_mean_distance(const std::vector<RecipeEmbedding>& points,
                              const std::vector<uint32_t>& ids) {
  double acc = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < ids.size(); ++i)
    for (size_t j = i + 1; j < ids.size(); ++j) {
      acc += std::sqrt(sq_dist(points[ids[i]].vec, points[ids[j]].vec));
      ++n;
    }
  return acc / static_cast<double>(n);
}

Recipe constant_recipe(Transform t) { return Recipe(kDefaultRecipeLength, t); }

}  // namespace

TEST_CASE("embed_recipes yields one 62-dim row per recipe, deterministically") {
  PredictorModel model = make_predictor({}, 41);
  std::mt19937_64 rng(42);
  std::vector<Recipe> recipes;
  for (int i = 0; i < 1500; ++i) {
    Recipe r(kDefaultRecipeLength);
    for (Transform& t : r) t = transform_from_id(static_cast<int>(rng() % kNumTransforms));
    recipes.push_back(std::move(r));
  }
  const std::vector<RecipeEmbedding> embeds = embed_recipes(model, recipes);
  REQUIRE(embeds.size() == 1500);
  for (size_t i = 0; i < embeds.size(); ++i) {
    CHECK(embeds[i].recipe == i);
    CHECK(embeds[i].vec.size() == 62);
    for (const double v : embeds[i].vec) CHECK(std::isfinite(v));
  }

  const std::vector<Recipe> three{recipes[0], recipes[1], recipes[0]};
  const std::vector<RecipeEmbedding> again = embed_recipes(model, three);
  CHECK(again[0].vec == again[2].vec);
  CHECK(again[0].vec == embeds[0].vec);

  const std::vector<RecipeEmbedding> poles = embed_recipes(
      model, {constant_recipe(Transform::balance), constant_recipe(Transform::rewrite)});
  CHECK(poles[0].vec != poles[1].vec);
}

TEST_CASE("k=1 centroid is the mean and the head its nearest member") {
  const std::vector<RecipeEmbedding> points =
      make_points({{0.0, 0.0}, {4.0, 0.0}, {0.0, 4.0}, {4.0, 4.0}, {2.5, 2.0}});
  const ClusterResult result = kmeans(points, 1, 9);
  CHECK(result.centroids.shape == std::vector<size_t>{1, 2});
  CHECK(result.centroids.at(0, 0) == doctest::Approx(2.1).epsilon(1e-12));
  CHECK(result.centroids.at(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(result.assignment == std::vector<uint32_t>(5, 0));
  CHECK(result.heads == std::vector<uint32_t>{4});
  double expect = 0.0;
  for (const RecipeEmbedding& p : points) expect += sq_dist(p.vec, {2.1, 2.0});
  CHECK(result.inertia == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("well-separated blobs are recovered exactly") {
  const std::vector<RecipeEmbedding> points =
      make_blobs({{0.0, 0.0}, {100.0, 0.0}, {0.0, 100.0}}, 20, 1.0, 5);
  for (uint64_t seed : {0, 1, 2, 3, 4}) {
    const ClusterResult result = kmeans(points, 3, seed);
    for (size_t blob = 0; blob < 3; ++blob) {
      const uint32_t rep = result.assignment[blob * 20];
      for (size_t i = 0; i < 20; ++i) CHECK(result.assignment[blob * 20 + i] == rep);
      const uint32_t head = result.heads[rep];
      CHECK(head >= blob * 20);
      CHECK(head < (blob + 1) * 20);
    }
    const std::set<uint32_t> labels(result.assignment.begin(), result.assignment.end());
    CHECK(labels.size() == 3);
  }
}

TEST_CASE("k equal to distinct points drives inertia to zero") {
  const std::vector<RecipeEmbedding> points = make_points(
      {{1.0, 1.0}, {5.0, 5.0}, {1.0, 1.0}, {9.0, 0.0}, {5.0, 5.0}, {1.0, 1.0}});
  const ClusterResult result = kmeans(points, 3, 17);
  CHECK(result.inertia == 0.0);
  const std::set<uint32_t> heads(result.heads.begin(), result.heads.end());
  CHECK(heads == std::set<uint32_t>{0, 1, 3});
  CHECK(result.assignment[0] == result.assignment[2]);
  CHECK(result.assignment[0] == result.assignment[5]);
  CHECK(result.assignment[1] == result.assignment[4]);
  CHECK(result.assignment[0] != result.assignment[1]);
  CHECK(result.assignment[0] != result.assignment[3]);

  CHECK_THROWS_AS(kmeans(points, 4, 17), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(points, 0, 17), std::invalid_argument);
  CHECK_THROWS_AS(kmeans({}, 1, 17), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(make_points({{1.0, 2.0}, {1.0}}), 1, 17), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(make_points({{std::nan("")}}), 1, 17), std::invalid_argument);
}

TEST_CASE("inertia is non-increasing over iterations and the assignment is a fixpoint") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::vector<std::vector<double>> vecs;
  for (int i = 0; i < 60; ++i) vecs.push_back({coord(rng), coord(rng), coord(rng)});
  const std::vector<RecipeEmbedding> points = make_points(vecs);

  double prev = std::numeric_limits<double>::infinity();
  for (uint32_t iters = 1; iters <= 8; ++iters) {
    KmeansOptions options;
    options.max_iter = iters;
    const ClusterResult result = kmeans(points, 5, 3, options);
    CHECK(result.inertia <= prev + 1e-9);
    prev = result.inertia;
  }

  const ClusterResult result = kmeans(points, 5, 3);
  for (size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    uint32_t arg = 0;
    for (uint32_t c = 0; c < 5; ++c) {
      std::vector<double> centroid(3);
      for (size_t f = 0; f < 3; ++f) centroid[f] = result.centroids.at(c, f);
      const double d = sq_dist(points[i].vec, centroid);
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    CHECK(result.assignment[i] == arg);
  }
}

TEST_CASE("duplicate-heavy data with plain seeding settles via empty-cluster relocation") {
  const std::vector<RecipeEmbedding> points = make_points(
      {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {10.0, 10.0}});
  KmeansOptions plain;
  plain.kmeanspp = false;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const ClusterResult result = kmeans(points, 2, seed, plain);
    CHECK(result.inertia == 0.0);
    std::set<uint32_t> labels(result.assignment.begin(), result.assignment.end());
    CHECK(labels.size() == 2);
    CHECK(result.assignment[5] != result.assignment[0]);
    const std::set<uint32_t> heads(result.heads.begin(), result.heads.end());
    CHECK(heads == std::set<uint32_t>{0, 5});
  }
}

TEST_CASE("cluster heads spread wider than random subsets on blob data") {
  const std::vector<RecipeEmbedding> points =
      make_blobs({{0.0, 0.0}, {50.0, 0.0}, {0.0, 50.0}, {50.0, 50.0}}, 15, 2.0, 21);
  const ClusterResult result = kmeans(points, 4, 1);
  const double active_spread = pairwise_mean_distance(points, result.heads);

  std::mt19937_64 rng(2);
  double random_spread = 0.0;
  const int draws = 200;
  for (int d = 0; d < draws; ++d) {
    std::vector<uint32_t> ids(points.size());
    for (uint32_t i = 0; i < ids.size(); ++i) ids[i] = i;
    for (uint32_t c = 0; c < 4; ++c) {
      std::uniform_int_distribution<uint32_t> u(c, static_cast<uint32_t>(ids.size()) - 1);
      std::swap(ids[c], ids[u(rng)]);
    }
    ids.resize(4);
    random_spread += pairwise_mean_distance(points, ids);
  }
  random_spread /= draws;
  CHECK(active_spread >= random_spread);
}

TEST_CASE("select_budget covers both modes with deterministic output") {
  std::vector<Recipe> pool;
  for (int t = 0; t < kNumTransforms; ++t)
    pool.push_back(constant_recipe(transform_from_id(t)));
  pool.push_back(resyn2_seed());

  const std::vector<uint32_t> r1 = select_budget(pool, SelectionMode::random, 3, 11);
  const std::vector<uint32_t> r2 = select_budget(pool, SelectionMode::random, 3, 11);
  CHECK(r1 == r2);
  CHECK(r1.size() == 3);
  CHECK(std::is_sorted(r1.begin(), r1.end()));
  CHECK(std::set<uint32_t>(r1.begin(), r1.end()).size() == 3);
  for (const uint32_t id : r1) CHECK(id < pool.size());

  PredictorModel model = make_predictor({}, 43);
  const std::vector<uint32_t> all =
      select_budget(pool, SelectionMode::active, static_cast<uint32_t>(pool.size()), 12, &model);
  std::vector<uint32_t> expect(pool.size());
  for (uint32_t i = 0; i < expect.size(); ++i) expect[i] = i;
  CHECK(all == expect);

  const std::vector<uint32_t> a1 = select_budget(pool, SelectionMode::active, 3, 13, &model);
  const std::vector<uint32_t> a2 = select_budget(pool, SelectionMode::active, 3, 13, &model);
  CHECK(a1 == a2);
  CHECK(a1.size() == 3);
  CHECK(std::set<uint32_t>(a1.begin(), a1.end()).size() == 3);

  CHECK_THROWS_AS(select_budget(pool, SelectionMode::random, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(
      select_budget(pool, SelectionMode::random, static_cast<uint32_t>(pool.size()) + 1, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(select_budget(pool, SelectionMode::active, 2, 1), std::invalid_argument);
}
