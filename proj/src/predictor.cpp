#include "aigforge/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace aigforge {

namespace {

using nn::Tensor;

constexpr size_t kFeatureDim = 4;

Tensor grad_of(const Tensor& t) { return Tensor::from(t.shape, t.grad); }

Tensor with_shape(Tensor t, std::vector<size_t> shape) {
  t.shape = std::move(shape);
  return t;
}

void init_uniform(Tensor& t, size_t fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (double& v : t.data) v = u(rng);
}

Tensor param(std::vector<size_t> shape, size_t fan_in, std::mt19937_64& rng) {
  Tensor t(std::move(shape), true);
  init_uniform(t, fan_in, rng);
  return t;
}

/*! \brief One mini-batch: merged unique designs plus per-row alignment. */
struct Plan {
  nn::GraphBatch graph;
  Tensor features;                      // [V_total x 4]
  std::vector<uint32_t> row_of_sample;  // sample -> merged graph id
  Tensor onehot;                        // [N*L x 7]
  Tensor labels;                        // [N]
};

Plan make_plan(const std::vector<const EncodedDesign*>& designs,
               const std::vector<const Recipe*>& recipes, const std::vector<double>& labels,
               const PredictorConfig& config) {
  const size_t n = designs.size();
  if (n == 0) throw std::invalid_argument("predictor: empty batch");
  if (recipes.size() != n) throw std::invalid_argument("predictor: design/recipe count mismatch");

  Plan plan;
  std::unordered_map<const EncodedDesign*, uint32_t> slot;
  std::vector<const EncodedDesign*> unique;
  plan.row_of_sample.reserve(n);
  for (const EncodedDesign* d : designs) {
    const auto [it, fresh] = slot.emplace(d, static_cast<uint32_t>(unique.size()));
    if (fresh) unique.push_back(d);
    plan.row_of_sample.push_back(it->second);
  }

  uint32_t total_nodes = 0;
  size_t total_edges = 0;
  for (const EncodedDesign* d : unique) {
    total_nodes += d->graph.num_nodes;
    total_edges += d->graph.edges.size();
  }
  plan.graph.num_nodes = total_nodes;
  plan.graph.num_graphs = static_cast<uint32_t>(unique.size());
  plan.graph.edges.reserve(total_edges);
  plan.graph.node_to_graph.reserve(total_nodes);
  plan.features = Tensor({total_nodes, kFeatureDim});
  uint32_t offset = 0;
  for (uint32_t gi = 0; gi < unique.size(); ++gi) {
    const EncodedDesign& d = *unique[gi];
    for (const auto& [s, t] : d.graph.edges) plan.graph.edges.emplace_back(s + offset, t + offset);
    for (uint32_t v = 0; v < d.graph.num_nodes; ++v) plan.graph.node_to_graph.push_back(gi);
    plan.graph.graph_sizes.push_back(d.graph.num_nodes);
    std::copy(d.features.data.begin(), d.features.data.end(),
              plan.features.data.begin() + offset * kFeatureDim);
    offset += d.graph.num_nodes;
  }
  plan.graph.finalize();

  const size_t len = config.recipe_length;
  plan.onehot = Tensor({n * len, kNumTransforms});
  for (size_t i = 0; i < n; ++i) {
    if (recipes[i]->size() != len) throw std::invalid_argument("predictor: malformed recipe");
    for (size_t j = 0; j < len; ++j)
      plan.onehot.at(i * len + j, static_cast<size_t>(transform_id((*recipes[i])[j]))) = 1.0;
  }
  if (!labels.empty()) plan.labels = Tensor::from({n}, labels);
  return plan;
}

/*! \brief Every intermediate of one forward pass, kept for the backward. */
struct Acts {
  Tensor x0, g1, n1, r1, g2, n2, r2, h_all, h_aig;
  nn::GraphConvCache gc1, gc2;
  nn::BatchNormCache bc1, bc2;
  nn::ReadoutCache rc;
  Tensor seq;
  std::array<Tensor, 4> conv_out;
  Tensor h_recipe, fused;
  std::array<Tensor, 3> fc_pre, fc_act;
  Tensor out;
};

Tensor mark(Tensor t) {
  t.requires_grad = true;
  return t;
}

Tensor gather_rows(const Tensor& src, const std::vector<uint32_t>& rows) {
  const size_t cols = src.dim(1);
  Tensor out({rows.size(), cols});
  for (size_t i = 0; i < rows.size(); ++i)
    std::copy_n(&src.data[rows[i] * cols], cols, &out.data[i * cols]);
  return out;
}

Tensor& graph_path(PredictorModel& m, const nn::GraphBatch& graph, const Tensor& features,
                   bool train, Acts& a) {
  a.x0 = mark(nn::affine(features, m.node_w, m.node_b));
  a.g1 = mark(nn::graph_conv(graph, a.x0, m.gcn1_w, m.gcn1_b, &a.gc1));
  a.n1 = mark(nn::batchnorm(a.g1, m.bn1_gamma, m.bn1_beta, m.bn1, train, &a.bc1));
  a.r1 = mark(nn::relu(a.n1));
  a.g2 = mark(nn::graph_conv(graph, a.r1, m.gcn2_w, m.gcn2_b, &a.gc2));
  a.n2 = mark(nn::batchnorm(a.g2, m.bn2_gamma, m.bn2_beta, m.bn2, train, &a.bc2));
  a.r2 = mark(nn::relu(a.n2));
  a.h_all = mark(nn::readout_mean_max(graph, a.r2, &a.rc));
  return a.h_all;
}

Tensor& recipe_path(PredictorModel& m, const Tensor& onehot, size_t n, Acts& a) {
  const PredictorConfig& c = m.config;
  const Tensor emb = nn::affine(onehot, m.token_w, m.token_b);
  a.seq = mark(with_shape(emb, {n, 1, c.recipe_embed_total()}));

  a.h_recipe = mark(Tensor({n, c.recipe_path_width()}));
  size_t col = 0;
  for (size_t k = 0; k < c.conv_kernels.size(); ++k) {
    a.conv_out[k] = nn::conv1d(a.seq, m.conv_w[k], m.conv_b[k], c.conv_stride);
    const size_t len = a.conv_out[k].dim(2);
    for (size_t i = 0; i < n; ++i)
      std::copy_n(&a.conv_out[k].data[i * len], len,
                  &a.h_recipe.data[i * c.recipe_path_width() + col]);
    col += len;
  }
  return a.h_recipe;
}

Tensor& head_path(PredictorModel& m, Acts& a) {
  a.fused = mark(nn::concat_cols(a.h_aig, a.h_recipe));
  const Tensor* in = &a.fused;
  for (size_t l = 0; l < 3; ++l) {
    a.fc_pre[l] = mark(nn::affine(*in, m.fc_w[l], m.fc_b[l]));
    a.fc_act[l] = mark(nn::relu(a.fc_pre[l]));
    in = &a.fc_act[l];
  }
  a.out = mark(nn::affine(*in, m.fc_w[3], m.fc_b[3]));
  return a.out;
}

Tensor& forward_plan(PredictorModel& m, const Plan& plan, bool train, Acts& a) {
  graph_path(m, plan.graph, plan.features, train, a);
  a.h_aig = mark(gather_rows(a.h_all, plan.row_of_sample));
  recipe_path(m, plan.onehot, plan.row_of_sample.size(), a);
  return head_path(m, a);
}

void backward_plan(PredictorModel& m, const Plan& plan, Acts& a) {
  const PredictorConfig& c = m.config;
  const size_t n = plan.row_of_sample.size();

  nn::affine_backward(grad_of(a.out), a.fc_act[2], m.fc_w[3], m.fc_b[3]);
  for (size_t l = 3; l-- > 0;) {
    nn::relu_backward(grad_of(a.fc_act[l]), a.fc_pre[l]);
    Tensor& in = l == 0 ? a.fused : a.fc_act[l - 1];
    nn::affine_backward(grad_of(a.fc_pre[l]), in, m.fc_w[l], m.fc_b[l]);
  }
  nn::concat_cols_backward(grad_of(a.fused), a.h_aig, a.h_recipe);

  a.h_all.ensure_grad();
  const size_t design_cols = a.h_all.dim(1);
  for (size_t i = 0; i < n; ++i)
    for (size_t f = 0; f < design_cols; ++f)
      a.h_all.grad[plan.row_of_sample[i] * design_cols + f] += a.h_aig.grad[i * design_cols + f];

  nn::readout_mean_max_backward(plan.graph, a.rc, grad_of(a.h_all), a.r2);
  nn::relu_backward(grad_of(a.r2), a.n2);
  nn::batchnorm_backward(a.bc2, grad_of(a.n2), a.g2, m.bn2_gamma, m.bn2_beta);
  nn::graph_conv_backward(plan.graph, a.gc2, grad_of(a.g2), a.r1, m.gcn2_w, m.gcn2_b);
  nn::relu_backward(grad_of(a.r1), a.n1);
  nn::batchnorm_backward(a.bc1, grad_of(a.n1), a.g1, m.bn1_gamma, m.bn1_beta);
  nn::graph_conv_backward(plan.graph, a.gc1, grad_of(a.g1), a.x0, m.gcn1_w, m.gcn1_b);
  Tensor features = plan.features;
  nn::affine_backward(grad_of(a.x0), features, m.node_w, m.node_b);

  size_t col = 0;
  for (size_t k = 0; k < c.conv_kernels.size(); ++k) {
    const size_t len = a.conv_out[k].dim(2);
    Tensor gk({n, 1, len});
    for (size_t i = 0; i < n; ++i)
      std::copy_n(&a.h_recipe.grad[i * c.recipe_path_width() + col], len, &gk.data[i * len]);
    nn::conv1d_backward(gk, c.conv_stride, a.seq, m.conv_w[k], m.conv_b[k]);
    col += len;
  }
  Tensor onehot = plan.onehot;
  nn::affine_backward(Tensor::from({n * c.recipe_length, c.token_embed_dim}, a.seq.grad), onehot,
                      m.token_w, m.token_b);
}

std::vector<nn::Tensor*> pointers(std::vector<std::pair<std::string, Tensor*>> named) {
  std::vector<Tensor*> out;
  out.reserve(named.size());
  for (auto& kv : named) out.push_back(kv.second);
  return out;
}

TrainResult run_training(PredictorModel& m, const std::vector<EncodedDesign>& designs,
                         const std::vector<Sample>& samples, uint64_t seed, size_t epochs,
                         bool split_groups) {
  if (samples.empty()) throw std::invalid_argument("training: empty dataset");
  for (const Sample& s : samples)
    if (s.design >= designs.size()) throw std::invalid_argument("training: design out of range");

  const std::vector<Tensor*> all = pointers(m.named_parameters());
  nn::AdamState whole;
  whole.lr = m.config.lr_zero_shot;
  nn::AdamState head;
  head.lr = m.config.lr_fine_tune_fc;
  nn::AdamState backbone;
  backbone.lr = m.config.lr_fine_tune_backbone;
  const std::vector<Tensor*> head_params = m.fc_parameters();
  const std::vector<Tensor*> backbone_params = m.backbone_parameters();

  std::mt19937_64 rng(seed);
  std::vector<size_t> order(samples.size());
  std::iota(order.begin(), order.end(), size_t{0});

  TrainResult result;
  for (size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (size_t start = 0; start < order.size(); start += m.config.batch_size) {
      const size_t count = std::min(m.config.batch_size, order.size() - start);
      std::vector<const EncodedDesign*> batch_designs(count);
      std::vector<const Recipe*> batch_recipes(count);
      std::vector<double> batch_labels(count);
      for (size_t i = 0; i < count; ++i) {
        const Sample& s = samples[order[start + i]];
        batch_designs[i] = &designs[s.design];
        batch_recipes[i] = &s.recipe;
        batch_labels[i] = s.label;
      }
      const Plan plan = make_plan(batch_designs, batch_recipes, batch_labels, m.config);

      for (Tensor* p : all) p->zero_grad();
      Acts acts;
      Tensor& out = forward_plan(m, plan, true, acts);
      loss_sum += nn::mse_loss(out, plan.labels) * static_cast<double>(count);
      nn::mse_loss_backward(out, plan.labels);
      backward_plan(m, plan, acts);

      if (split_groups) {
        nn::adam_step(head_params, head);
        nn::adam_step(backbone_params, backbone);
      } else {
        nn::adam_step(all, whole);
      }
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(samples.size()));
  }
  return result;
}

}  // namespace

size_t PredictorConfig::recipe_path_width() const {
  size_t total = 0;
  for (const size_t k : conv_kernels) total += (recipe_embed_total() - k) / conv_stride + 1;
  return total;
}

EncodedDesign encode_aig(const Aig& aig) {
  const uint32_t v_cnt = aig.num_pis() + aig.num_ands();
  if (v_cnt == 0) throw std::invalid_argument("encode_aig: empty network");

  std::vector<uint8_t> drives_po(aig.num_nodes(), 0);
  for (const Literal po : aig.outputs) drives_po[po.var()] = 1;

  EncodedDesign d;
  d.features = Tensor({v_cnt, kFeatureDim});
  d.graph.num_nodes = v_cnt;
  d.graph.num_graphs = 1;
  d.graph.node_to_graph.assign(v_cnt, 0);
  d.graph.graph_sizes = {v_cnt};
  for (uint32_t var = 1; var < aig.num_nodes(); ++var) {
    const uint32_t row = var - 1;
    d.graph.edges.emplace_back(row, row);
    if (aig.is_pi(var)) {
      d.features.at(row, 0) = 1.0;
      continue;
    }
    const AndGate& g = aig.gate_of(var);
    d.features.at(row, drives_po[var] ? 1 : 2) = 1.0;
    d.features.at(row, 3) =
        static_cast<double>(g.fanin0.complemented()) + static_cast<double>(g.fanin1.complemented());
    for (const Literal f : {g.fanin0, g.fanin1})
      if (f.var() >= 1) d.graph.edges.emplace_back(f.var() - 1, row);
  }
  d.graph.finalize();
  return d;
}

std::vector<std::pair<std::string, Tensor*>> PredictorModel::named_parameters() {
  std::vector<std::pair<std::string, Tensor*>> named{
      {"node.w", &node_w},       {"node.b", &node_b},       {"gcn1.w", &gcn1_w},
      {"gcn1.b", &gcn1_b},       {"bn1.gamma", &bn1_gamma}, {"bn1.beta", &bn1_beta},
      {"gcn2.w", &gcn2_w},       {"gcn2.b", &gcn2_b},       {"bn2.gamma", &bn2_gamma},
      {"bn2.beta", &bn2_beta},   {"token.w", &token_w},     {"token.b", &token_b},
  };
  for (size_t k = 0; k < conv_w.size(); ++k) {
    named.emplace_back("conv" + std::to_string(k) + ".w", &conv_w[k]);
    named.emplace_back("conv" + std::to_string(k) + ".b", &conv_b[k]);
  }
  for (size_t l = 0; l < fc_w.size(); ++l) {
    named.emplace_back("fc" + std::to_string(l) + ".w", &fc_w[l]);
    named.emplace_back("fc" + std::to_string(l) + ".b", &fc_b[l]);
  }
  return named;
}

std::vector<Tensor*> PredictorModel::fc_parameters() {
  std::vector<Tensor*> out;
  for (auto& t : fc_w) out.push_back(&t);
  for (auto& t : fc_b) out.push_back(&t);
  return out;
}

std::vector<Tensor*> PredictorModel::backbone_parameters() {
  std::vector<Tensor*> out;
  for (auto& [name, t] : named_parameters())
    if (name.rfind("fc", 0) != 0) out.push_back(t);
  return out;
}

PredictorModel make_predictor(const PredictorConfig& config, uint64_t seed) {
  PredictorModel m;
  m.config = config;
  std::mt19937_64 rng(seed);

  m.node_w = param({kFeatureDim, kFeatureDim}, kFeatureDim, rng);
  m.node_b = param({kFeatureDim}, kFeatureDim, rng);
  m.gcn1_w = param({kFeatureDim, config.gcn_dims[0]}, kFeatureDim, rng);
  m.gcn1_b = param({config.gcn_dims[0]}, kFeatureDim, rng);
  m.bn1_gamma = Tensor::from({config.gcn_dims[0]},
                             std::vector<double>(config.gcn_dims[0], 1.0), true);
  m.bn1_beta = Tensor({config.gcn_dims[0]}, true);
  m.bn1 = nn::BatchNormState(config.gcn_dims[0]);
  m.gcn2_w = param({config.gcn_dims[0], config.gcn_dims[1]}, config.gcn_dims[0], rng);
  m.gcn2_b = param({config.gcn_dims[1]}, config.gcn_dims[0], rng);
  m.bn2_gamma = Tensor::from({config.gcn_dims[1]},
                             std::vector<double>(config.gcn_dims[1], 1.0), true);
  m.bn2_beta = Tensor({config.gcn_dims[1]}, true);
  m.bn2 = nn::BatchNormState(config.gcn_dims[1]);

  m.token_w = param({kNumTransforms, config.token_embed_dim}, kNumTransforms, rng);
  m.token_b = param({config.token_embed_dim}, kNumTransforms, rng);
  for (size_t k = 0; k < config.conv_kernels.size(); ++k) {
    m.conv_w[k] = param({1, config.conv_kernels[k]}, config.conv_kernels[k], rng);
    m.conv_b[k] = param({1}, config.conv_kernels[k], rng);
  }

  std::vector<size_t> widths{config.head_width()};
  widths.insert(widths.end(), config.fc_hidden.begin(), config.fc_hidden.end());
  widths.push_back(1);
  for (size_t l = 0; l + 1 < widths.size(); ++l) {
    m.fc_w.push_back(param({widths[l], widths[l + 1]}, widths[l], rng));
    m.fc_b.push_back(param({widths[l + 1]}, widths[l], rng));
  }
  return m;
}

std::string architecture_fingerprint(const PredictorConfig& c) {
  std::string s = "gcn" + std::to_string(kFeatureDim);
  for (const size_t d : c.gcn_dims) s += "-" + std::to_string(d);
  s += ";tok" + std::to_string(kNumTransforms) + "x" + std::to_string(c.token_embed_dim) + "x" +
       std::to_string(c.recipe_length);
  s += ";conv";
  for (size_t k = 0; k < c.conv_kernels.size(); ++k)
    s += (k ? "-" : "") + std::to_string(c.conv_kernels[k]);
  s += "s" + std::to_string(c.conv_stride);
  s += ";fc" + std::to_string(c.head_width());
  for (const size_t w : c.fc_hidden) s += "-" + std::to_string(w);
  s += "-1";
  return s;
}

namespace {

std::vector<std::pair<std::string, Tensor*>> checkpoint_slots(PredictorModel& m) {
  auto named = m.named_parameters();
  named.emplace_back("bn1.mean", &m.bn1.running_mean);
  named.emplace_back("bn1.var", &m.bn1.running_var);
  named.emplace_back("bn2.mean", &m.bn2.running_mean);
  named.emplace_back("bn2.var", &m.bn2.running_var);
  return named;
}

}  // namespace

void save_predictor(const PredictorModel& model, const std::string& path,
                    const std::map<std::string, std::string>& extra_meta) {
  PredictorModel& m = const_cast<PredictorModel&>(model);
  std::vector<std::pair<std::string, const Tensor*>> named;
  for (auto& [name, t] : checkpoint_slots(m)) named.emplace_back(name, t);
  std::map<std::string, std::string> meta = extra_meta;
  meta["arch"] = architecture_fingerprint(model.config);
  nn::write_checkpoint(path, named, meta);
}

PredictorModel load_predictor(const std::string& path, const PredictorConfig& config) {
  PredictorModel m = make_predictor(config, 0);
  const auto meta = nn::read_checkpoint(path, checkpoint_slots(m));
  const auto it = meta.find("arch");
  if (it == meta.end() || it->second != architecture_fingerprint(config))
    throw std::runtime_error("predictor: checkpoint architecture mismatch");
  return m;
}

std::vector<double> predict(PredictorModel& model,
                            const std::vector<const EncodedDesign*>& designs,
                            const std::vector<Recipe>& recipes) {
  if (designs.empty()) return {};
  std::vector<const Recipe*> recipe_ptrs;
  recipe_ptrs.reserve(recipes.size());
  for (const Recipe& r : recipes) recipe_ptrs.push_back(&r);
  const Plan plan = make_plan(designs, recipe_ptrs, {}, model.config);
  Acts acts;
  const Tensor out = forward_plan(model, plan, false, acts);
  return out.data;
}

Tensor design_embedding(PredictorModel& model, const EncodedDesign& design) {
  Acts acts;
  graph_path(model, design.graph, design.features, false, acts);
  return with_shape(std::move(acts.h_all), {1, model.config.design_path_width()});
}

nn::Tensor recipe_embeddings(PredictorModel& model, const std::vector<Recipe>& recipes) {
  if (recipes.empty()) throw std::invalid_argument("recipe_embeddings: no recipes");
  const size_t len = model.config.recipe_length;
  Tensor onehot({recipes.size() * len, kNumTransforms});
  for (size_t i = 0; i < recipes.size(); ++i) {
    if (recipes[i].size() != len) throw std::invalid_argument("predictor: malformed recipe");
    for (size_t j = 0; j < len; ++j)
      onehot.at(i * len + j, static_cast<size_t>(transform_id(recipes[i][j]))) = 1.0;
  }
  Acts acts;
  return recipe_path(model, onehot, recipes.size(), acts);
}

double predict_cached(PredictorModel& model, const Tensor& h_aig, const Recipe& recipe) {
  if (recipe.size() != model.config.recipe_length)
    throw std::invalid_argument("predictor: malformed recipe");
  Tensor onehot({model.config.recipe_length, kNumTransforms});
  for (size_t j = 0; j < recipe.size(); ++j)
    onehot.at(j, static_cast<size_t>(transform_id(recipe[j]))) = 1.0;

  Acts acts;
  acts.h_aig = h_aig;
  recipe_path(model, onehot, 1, acts);
  return head_path(model, acts).data[0];
}

double training_loss(PredictorModel& model, const std::vector<EncodedDesign>& designs,
                     const std::vector<Sample>& samples) {
  if (samples.empty()) throw std::invalid_argument("training: empty dataset");
  std::vector<const EncodedDesign*> row_designs;
  std::vector<const Recipe*> row_recipes;
  std::vector<double> labels;
  for (const Sample& s : samples) {
    if (s.design >= designs.size()) throw std::invalid_argument("training: design out of range");
    row_designs.push_back(&designs[s.design]);
    row_recipes.push_back(&s.recipe);
    labels.push_back(s.label);
  }
  const Plan plan = make_plan(row_designs, row_recipes, labels, model.config);
  for (auto& kv : model.named_parameters()) kv.second->zero_grad();
  Acts acts;
  Tensor& out = forward_plan(model, plan, true, acts);
  const double loss = nn::mse_loss(out, plan.labels);
  nn::mse_loss_backward(out, plan.labels);
  backward_plan(model, plan, acts);
  return loss;
}

TrainResult train_zero_shot(PredictorModel& model, const std::vector<EncodedDesign>& designs,
                            const std::vector<Sample>& samples, uint64_t seed) {
  return run_training(model, designs, samples, seed, model.config.epochs_zero_shot, false);
}

TrainResult fine_tune(PredictorModel& model, const std::vector<EncodedDesign>& designs,
                      const std::vector<Sample>& samples, uint64_t seed) {
  return run_training(model, designs, samples, seed, model.config.epochs_fine_tune, true);
}

PredictorModel train_standalone(const PredictorConfig& config,
                                const std::vector<EncodedDesign>& designs,
                                const std::vector<Sample>& samples, uint64_t seed,
                                TrainResult* result) {
  PredictorModel model = make_predictor(config, seed);
  TrainResult r = train_zero_shot(model, designs, samples, seed);
  if (result) *result = std::move(r);
  return model;
}

}  // namespace aigforge
