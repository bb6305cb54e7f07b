#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "aigforge/aig.hpp"
#include "aigforge/predictor.hpp"
#include "aigforge/random_circuit.hpp"
#include "aigforge/recipe.hpp"

using namespace aigforge;

namespace {

Recipe random_recipe(std::mt19937_64& rng, size_t len = kDefaultRecipeLength) {
  Recipe r(len);
  for (Transform& t : r) t = transform_from_id(static_cast<int>(rng() % kNumTransforms));
  return r;
}

std::vector<EncodedDesign> encode_corpus(uint32_t count, uint32_t target, uint64_t seed) {
  std::vector<EncodedDesign> out;
  for (uint32_t i = 0; i < count; ++i)
    out.push_back(encode_aig(random_aig(
        {.num_pis = 6, .num_pos = 3, .target_ands = target, .seed = seed + i})));
  return out;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

void zero_parameters(PredictorModel& m) {
  for (auto& kv : m.named_parameters()) std::fill(kv.second->data.begin(), kv.second->data.end(), 0.0);
}

}  // namespace

TEST_CASE("config arithmetic reproduces the fixed architecture") {
  const PredictorConfig c;
  CHECK(c.recipe_embed_total() == 60);
  CHECK(c.recipe_path_width() == 62);
  CHECK(c.design_path_width() == 128);
  CHECK(c.head_width() == 190);
  CHECK(architecture_fingerprint(c) == "gcn4-64-64;tok7x3x20;conv12-15-18-21s3;fc190-512-512-512-1");
}

TEST_CASE("encode_aig extracts types, inverter counts, and fanin edges") {
  AigBuilder b(2);
  const Literal g = b.strash_and(b.pi(0), b.pi(1));
  b.add_output(g);
  const EncodedDesign d = encode_aig(b.build());

  CHECK(d.graph.num_nodes == 3);
  CHECK(d.features.shape == std::vector<size_t>{3, 4});
  CHECK(d.features.at(0, 0) == 1.0);
  CHECK(d.features.at(1, 0) == 1.0);
  CHECK(d.features.at(2, 1) == 1.0);
  CHECK(d.features.at(2, 3) == 0.0);
  CHECK(d.graph.edges.size() == 5);

  AigBuilder b2(3);
  const Literal inner = b2.strash_and(b2.pi(0), !b2.pi(1));
  const Literal top = b2.strash_and(inner, b2.pi(2));
  b2.add_output(top);
  const EncodedDesign d2 = encode_aig(b2.build());
  CHECK(d2.features.at(3, 2) == 1.0);
  CHECK(d2.features.at(3, 3) == 1.0);
  CHECK(d2.features.at(4, 1) == 1.0);
  CHECK(d2.features.at(4, 3) == 0.0);

  CHECK_THROWS_AS(encode_aig(Aig{}), std::invalid_argument);
}

TEST_CASE("zero parameters give zero predictions") {
  PredictorModel m = make_predictor({}, 3);
  zero_parameters(m);
  const std::vector<EncodedDesign> designs = encode_corpus(2, 40, 100);
  std::mt19937_64 rng(4);
  const std::vector<Recipe> recipes{random_recipe(rng), random_recipe(rng)};
  const std::vector<double> pred = predict(m, {&designs[0], &designs[1]}, recipes);
  CHECK(pred == std::vector<double>{0.0, 0.0});
}

TEST_CASE("identical rows predict identically and batches permute cleanly") {
  PredictorModel m = make_predictor({}, 5);
  const std::vector<EncodedDesign> designs = encode_corpus(3, 50, 200);
  std::mt19937_64 rng(6);
  const Recipe r0 = random_recipe(rng), r1 = random_recipe(rng), r2 = random_recipe(rng);

  const std::vector<double> twin =
      predict(m, {&designs[0], &designs[0]}, {r0, r0});
  CHECK(twin[0] == twin[1]);

  const std::vector<double> fwd =
      predict(m, {&designs[0], &designs[1], &designs[2]}, {r0, r1, r2});
  const std::vector<double> rev =
      predict(m, {&designs[2], &designs[1], &designs[0]}, {r2, r1, r0});
  for (int i = 0; i < 3; ++i) CHECK(fwd[i] == doctest::Approx(rev[2 - i]).epsilon(1e-12));
}

TEST_CASE("prediction is invariant to node relabeling") {
  PredictorModel m = make_predictor({}, 7);
  const EncodedDesign d = encode_corpus(1, 60, 300)[0];

  EncodedDesign flipped;
  const uint32_t v_cnt = d.graph.num_nodes;
  const auto relabel = [&](uint32_t v) { return v_cnt - 1 - v; };
  flipped.graph.num_nodes = v_cnt;
  flipped.graph.num_graphs = 1;
  flipped.graph.node_to_graph.assign(v_cnt, 0);
  flipped.graph.graph_sizes = {v_cnt};
  for (const auto& [s, t] : d.graph.edges)
    flipped.graph.edges.emplace_back(relabel(s), relabel(t));
  flipped.graph.finalize();
  flipped.features = nn::Tensor({v_cnt, 4});
  for (uint32_t v = 0; v < v_cnt; ++v)
    for (size_t f = 0; f < 4; ++f) flipped.features.at(relabel(v), f) = d.features.at(v, f);

  std::mt19937_64 rng(8);
  const Recipe r = random_recipe(rng);
  const std::vector<double> a = predict(m, {&d}, {r});
  const std::vector<double> b = predict(m, {&flipped}, {r});
  CHECK(rel_err(a[0], b[0]) < 1e-9);
}

TEST_CASE("cached design embeddings reproduce full predictions") {
  PredictorModel m = make_predictor({}, 9);
  const std::vector<EncodedDesign> designs = encode_corpus(2, 45, 400);
  std::mt19937_64 rng(10);
  const Recipe r = random_recipe(rng);

  const nn::Tensor h = design_embedding(m, designs[1]);
  CHECK(h.shape == std::vector<size_t>{1, 128});
  const double fast = predict_cached(m, h, r);
  const double full = predict(m, {&designs[1]}, {r})[0];
  CHECK(fast == doctest::Approx(full).epsilon(1e-14));
}

TEST_CASE("recipe embeddings have the documented width and are deterministic") {
  PredictorModel m = make_predictor({}, 11);
  std::mt19937_64 rng(12);
  const Recipe a = random_recipe(rng), b = random_recipe(rng);
  const nn::Tensor e = recipe_embeddings(m, {a, b, a});
  CHECK(e.shape == std::vector<size_t>{3, 62});
  for (size_t f = 0; f < 62; ++f) CHECK(e.at(0, f) == e.at(2, f));

  bool differs = false;
  for (size_t f = 0; f < 62; ++f) differs |= e.at(0, f) != e.at(1, f);
  CHECK(differs);

  CHECK_THROWS_AS(recipe_embeddings(m, {Recipe(5, Transform::balance)}), std::invalid_argument);
}

TEST_CASE("end-to-end gradients match finite differences") {
  PredictorModel m = make_predictor({}, 13);
  AigBuilder b(3);
  const Literal inner = b.strash_and(b.pi(0), !b.pi(1));
  const Literal top = b.strash_and(inner, b.pi(2));
  b.add_output(top);
  const std::vector<EncodedDesign> designs{encode_aig(b.build())};
  const std::vector<Sample> samples{{0, resyn2_seed(), 0.7}};

  training_loss(m, designs, samples);

  std::mt19937_64 rng(14);
  std::vector<nn::Tensor*> probes{&m.gcn1_w, &m.node_w,    &m.token_w,  &m.conv_w[2],
                                  &m.fc_w[0], &m.bn1_gamma, &m.fc_b[3]};
  for (nn::Tensor* t : probes) {
    const size_t i = rng() % t->data.size();
    const double analytic = t->grad[i];
    const double keep = t->data[i];
    const double h = 1e-4;
    t->data[i] = keep + h;
    const double up = training_loss(m, designs, samples);
    t->data[i] = keep - h;
    const double down = training_loss(m, designs, samples);
    t->data[i] = keep;
    CHECK(rel_err(analytic, (up - down) / (2.0 * h)) < 1e-3);
  }
}

TEST_CASE("zero-shot training fits a constant label") {
  PredictorConfig config;
  PredictorModel m = make_predictor(config, 15);
  const std::vector<EncodedDesign> designs = encode_corpus(1, 40, 500);
  std::mt19937_64 rng(16);
  const Recipe pinned = random_recipe(rng);
  std::vector<Sample> samples;
  for (int k = 0; k < 192; ++k) samples.push_back({0, pinned, 0.4});

  const TrainResult result = train_zero_shot(m, designs, samples, 17);
  CHECK(result.epoch_loss.size() == config.epochs_zero_shot);
  CHECK(result.epoch_loss.back() < 1e-6);
  const double fitted = predict(m, {&designs[0]}, {pinned})[0];
  CHECK(fitted == doctest::Approx(0.4).epsilon(1e-4));
}

TEST_CASE("zero-shot training learns token-count labels") {
  PredictorConfig config;
  PredictorModel m = make_predictor(config, 19);
  const std::vector<EncodedDesign> designs = encode_corpus(2, 40, 600);

  const double weight[kNumTransforms] = {1.9, 0.3, 1.1, 0.2, 1.5, 0.7, 0.1};
  std::mt19937_64 rng(20);
  std::vector<Sample> samples;
  double mean = 0.0;
  for (uint32_t d = 0; d < 2; ++d)
    for (int k = 0; k < 500; ++k) {
      Sample s{d, random_recipe(rng), 0.0};
      for (const Transform t : s.recipe) s.label += weight[transform_id(t)];
      s.label /= static_cast<double>(s.recipe.size());
      mean += s.label;
      samples.push_back(std::move(s));
    }
  mean /= static_cast<double>(samples.size());
  double variance = 0.0;
  for (const Sample& s : samples) variance += (s.label - mean) * (s.label - mean);
  variance /= static_cast<double>(samples.size());

  const TrainResult result = train_zero_shot(m, designs, samples, 21);
  CHECK(result.epoch_loss.back() < 0.25 * variance);
}

TEST_CASE("fine-tuning refits seen rows and honours the group split") {
  PredictorConfig config;
  config.epochs_zero_shot = 10;
  PredictorModel m = make_predictor(config, 23);
  const std::vector<EncodedDesign> designs = encode_corpus(2, 35, 700);
  std::mt19937_64 rng(24);
  std::vector<Sample> samples;
  for (uint32_t d = 0; d < 2; ++d)
    for (int k = 0; k < 20; ++k) {
      Sample s{d, random_recipe(rng), 0.3 + 0.01 * static_cast<double>(k % 5)};
      samples.push_back(std::move(s));
    }
  train_zero_shot(m, designs, samples, 25);

  const double before = training_loss(m, designs, samples);
  const TrainResult ft = fine_tune(m, designs, samples, 26);
  CHECK(ft.epoch_loss.size() == config.epochs_fine_tune);
  const double after = training_loss(m, designs, samples);
  CHECK(after <= before + 1e-9);

  // Controlled-gradient probe: unit gradients through both groups move the
  // head ten times further than the backbone on the first step.
  PredictorModel probe = make_predictor(config, 27);
  const auto step_norm = [&](const std::vector<nn::Tensor*>& params, double lr) {
    nn::AdamState state;
    state.lr = lr;
    std::vector<double> before_data;
    for (nn::Tensor* t : params) {
      t->ensure_grad();
      std::fill(t->grad.begin(), t->grad.end(), 1.0);
      before_data.insert(before_data.end(), t->data.begin(), t->data.end());
    }
    nn::adam_step(params, state);
    double acc = 0.0;
    size_t n = 0, at = 0;
    for (nn::Tensor* t : params)
      for (const double v : t->data) {
        acc += std::abs(v - before_data[at++]);
        ++n;
      }
    return acc / static_cast<double>(n);
  };
  const double head_step = step_norm(probe.fc_parameters(), config.lr_fine_tune_fc);
  const double backbone_step = step_norm(probe.backbone_parameters(), config.lr_fine_tune_backbone);
  CHECK(head_step == doctest::Approx(10.0 * backbone_step).epsilon(1e-9));

  // Degenerate budget: a single record still trains and moves the model.
  PredictorModel one = make_predictor(config, 28);
  const std::vector<double> fc_before = one.fc_w[0].data;
  fine_tune(one, designs, {samples[0]}, 29);
  CHECK(one.fc_w[0].data != fc_before);
}

TEST_CASE("standalone training starts fresh and diverges from fine-tuning") {
  PredictorConfig config;
  config.epochs_zero_shot = 8;
  config.epochs_fine_tune = 8;
  const std::vector<EncodedDesign> designs = encode_corpus(2, 35, 800);
  std::mt19937_64 rng(30);
  std::vector<Sample> samples;
  for (uint32_t d = 0; d < 2; ++d)
    for (int k = 0; k < 12; ++k) samples.push_back({d, random_recipe(rng), 0.5});

  PredictorModel zs = make_predictor(config, 31);
  train_zero_shot(zs, designs, samples, 32);
  PredictorModel ft = zs;
  fine_tune(ft, designs, samples, 33);

  TrainResult alone_curve;
  const PredictorModel alone = train_standalone(config, designs, samples, 33, &alone_curve);
  CHECK(alone_curve.epoch_loss.size() == config.epochs_zero_shot);
  CHECK(alone.fc_w[0].data != ft.fc_w[0].data);

  CHECK_THROWS_AS(train_zero_shot(zs, designs, {}, 34), std::invalid_argument);
}

TEST_CASE("checkpoints are seed-deterministic and fingerprint-guarded") {
  PredictorConfig config;
  config.epochs_zero_shot = 4;
  const std::vector<EncodedDesign> designs = encode_corpus(2, 30, 900);
  std::mt19937_64 rng(35);
  std::vector<Sample> samples;
  for (int k = 0; k < 10; ++k) samples.push_back({static_cast<uint32_t>(k % 2), random_recipe(rng), 0.6});

  const auto train_once = [&](const std::string& path) {
    PredictorModel m = make_predictor(config, 36);
    train_zero_shot(m, designs, samples, 37);
    save_predictor(m, path, {{"stage", "zs"}});
  };
  train_once("test_predictor_a.ckpt");
  train_once("test_predictor_b.ckpt");

  const auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp("test_predictor_a.ckpt");
  CHECK(!a.empty());
  CHECK(a == slurp("test_predictor_b.ckpt"));

  PredictorModel loaded = load_predictor("test_predictor_a.ckpt", config);
  PredictorModel m = make_predictor(config, 36);
  train_zero_shot(m, designs, samples, 37);
  const Recipe r = random_recipe(rng);
  CHECK(predict(loaded, {&designs[0]}, {r}) == predict(m, {&designs[0]}, {r}));

  // A tampered fingerprint must be refused.
  std::string text = a;
  const size_t pos = text.find("meta arch ");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("meta arch ").size(), "meta arch x");
  std::ofstream("test_predictor_c.ckpt") << text;
  CHECK_THROWS_AS(load_predictor("test_predictor_c.ckpt", config), std::runtime_error);

  std::remove("test_predictor_a.ckpt");
  std::remove("test_predictor_b.ckpt");
  std::remove("test_predictor_c.ckpt");
}
