/*!
  \file predictor.hpp
  \brief Graph + recipe QoR predictor: encoding, training, inference
*/

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aigforge/aig.hpp"
#include "aigforge/nn.hpp"
#include "aigforge/recipe.hpp"

namespace aigforge {

/*! \brief Fixed network architecture and training hyperparameters. */
struct PredictorConfig {
  size_t recipe_length{kDefaultRecipeLength};
  size_t token_embed_dim{3};
  std::array<size_t, 2> gcn_dims{64, 64};
  std::array<size_t, 4> conv_kernels{12, 15, 18, 21};
  size_t conv_stride{3};
  std::array<size_t, 3> fc_hidden{512, 512, 512};
  size_t epochs_zero_shot{80};
  size_t epochs_fine_tune{20};
  size_t batch_size{64};
  double lr_zero_shot{0.01};
  double lr_fine_tune_fc{0.01};
  double lr_fine_tune_backbone{0.001};

  /*! \brief Flattened token-embedding length fed to the conv filters (60). */
  size_t recipe_embed_total() const { return recipe_length * token_embed_dim; }
  /*! \brief Concatenated conv output length (62). */
  size_t recipe_path_width() const;
  /*! \brief Readout width: mean and max of the last graph layer (128). */
  size_t design_path_width() const { return 2 * gcn_dims[1]; }
  /*! \brief Head input width (190). */
  size_t head_width() const { return design_path_width() + recipe_path_width(); }
};

/*! \brief One design prepared for the graph path: finalized batch + [V×4]. */
struct EncodedDesign {
  nn::GraphBatch graph;
  nn::Tensor features;
};

/*! \brief Per-node features and fanin edges of one network.
 *
 * One row per PI and AND node in variable order. Features are the type
 * one-hot (PI, PO driver, internal) followed by the complemented-fanin
 * count; edges run fanin to node, plus a self-loop on every node.
 */
EncodedDesign encode_aig(const Aig& aig);

/*! \brief One supervised pair: design index, recipe, normalized label. */
struct Sample {
  uint32_t design{0};
  Recipe recipe;
  double label{0.0};
};

/*! \brief All named parameters and batch-norm state of the two-path net. */
struct PredictorModel {
  PredictorConfig config;

  nn::Tensor node_w, node_b;
  nn::Tensor gcn1_w, gcn1_b, bn1_gamma, bn1_beta;
  nn::Tensor gcn2_w, gcn2_b, bn2_gamma, bn2_beta;
  nn::BatchNormState bn1, bn2;
  nn::Tensor token_w, token_b;
  std::array<nn::Tensor, 4> conv_w;
  std::array<nn::Tensor, 4> conv_b;
  std::vector<nn::Tensor> fc_w, fc_b;

  /*! \brief Trainable tensors with stable checkpoint names. */
  std::vector<std::pair<std::string, nn::Tensor*>> named_parameters();
  /*! \brief Head parameters (the fully connected stack). */
  std::vector<nn::Tensor*> fc_parameters();
  /*! \brief Everything upstream of the head: graph, token, and conv path. */
  std::vector<nn::Tensor*> backbone_parameters();
};

/*! \brief Seeded fan-in-uniform initialization of the fixed architecture. */
PredictorModel make_predictor(const PredictorConfig& config, uint64_t seed);

/*! \brief Architecture fingerprint stored in and checked against checkpoints. */
std::string architecture_fingerprint(const PredictorConfig& config);

/*! \brief Writes parameters, batch-norm state, and the fingerprint. */
void save_predictor(const PredictorModel& model, const std::string& path,
                    const std::map<std::string, std::string>& extra_meta = {});

/*! \brief Loads a checkpoint, refusing a mismatched fingerprint. */
PredictorModel load_predictor(const std::string& path, const PredictorConfig& config = {});

/*! \brief Eval-mode predictions for aligned (design, recipe) pairs. */
std::vector<double> predict(PredictorModel& model,
                            const std::vector<const EncodedDesign*>& designs,
                            const std::vector<Recipe>& recipes);

/*! \brief Eval-mode design embedding h_AIG, [1×128]. */
nn::Tensor design_embedding(PredictorModel& model, const EncodedDesign& design);

/*! \brief Prediction from a cached design embedding: the annealer fast path. */
double predict_cached(PredictorModel& model, const nn::Tensor& h_aig, const Recipe& recipe);

/*! \brief Eval-mode recipe-path embeddings h_recipe, [N×62]. */
nn::Tensor recipe_embeddings(PredictorModel& model, const std::vector<Recipe>& recipes);

/*! \brief Per-epoch mean training loss. */
struct TrainResult {
  std::vector<double> epoch_loss;
};

/*! \brief Training-mode loss over one full batch; fills parameter gradients. */
double training_loss(PredictorModel& model, const std::vector<EncodedDesign>& designs,
                     const std::vector<Sample>& samples);

/*! \brief Mini-batch Adam on the full parameter set (batch 64, lr 0.01). */
TrainResult train_zero_shot(PredictorModel& model, const std::vector<EncodedDesign>& designs,
                            const std::vector<Sample>& samples, uint64_t seed);

/*! \brief Budgeted refit: head at lr 0.01, backbone at lr 0.001, 20 epochs. */
TrainResult fine_tune(PredictorModel& model, const std::vector<EncodedDesign>& designs,
                      const std::vector<Sample>& samples, uint64_t seed);

/*! \brief Fresh model trained only on the budget set (the Standalone variant). */
PredictorModel train_standalone(const PredictorConfig& config,
                                const std::vector<EncodedDesign>& designs,
                                const std::vector<Sample>& samples, uint64_t seed,
                                TrainResult* result = nullptr);

}  // namespace aigforge
