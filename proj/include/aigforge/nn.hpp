/*!
  \file nn.hpp
  \brief Dense tensors, reverse-mode layer kernels, Adam, and checkpoints
*/

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace aigforge::nn {

/*! \brief Row-major 64-bit float tensor with an optional gradient buffer. */
struct Tensor {
  std::vector<size_t> shape;
  std::vector<double> data;
  std::vector<double> grad;  // same length as data when requires_grad
  bool requires_grad{false};

  Tensor() = default;
  explicit Tensor(std::vector<size_t> s, bool rg = false);
  static Tensor from(std::vector<size_t> s, std::vector<double> values, bool rg = false);

  size_t size() const { return data.size(); }
  size_t dim(size_t i) const { return shape[i]; }
  double& at(size_t r, size_t c) { return data[r * shape.back() + c]; }
  double at(size_t r, size_t c) const { return data[r * shape.back() + c]; }

  void ensure_grad();
  void zero_grad();
};

/*! \brief Batched sparse graph: directed edges with self-loops required.
 *
 * Degrees count the self-loop, matching the u ∪ N(u) aggregation, and
 * edge_norm holds the symmetric normalization 1/(√deg(s)·√deg(d)).
 */
struct GraphBatch {
  uint32_t num_nodes{0};
  uint32_t num_graphs{0};
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  std::vector<uint32_t> node_to_graph;
  std::vector<uint32_t> graph_sizes;
  std::vector<uint32_t> degrees;
  std::vector<double> edge_norm;

  /*! \brief Computes degrees and norms; rejects missing self-loops. */
  void finalize();
};

/*! \brief y = xW + b for x [N×I], W [I×O], b [O]. */
Tensor affine(const Tensor& x, const Tensor& W, const Tensor& b);
void affine_backward(const Tensor& grad_y, Tensor& x, Tensor& W, Tensor& b);

struct GraphConvCache {
  Tensor agg;  // normalized neighbourhood sums, [V×F_in]
};

/*! \brief Symmetrically normalized graph convolution, activation excluded. */
Tensor graph_conv(const GraphBatch& g, const Tensor& h, const Tensor& W, const Tensor& b,
                  GraphConvCache* cache = nullptr);
void graph_conv_backward(const GraphBatch& g, const GraphConvCache& cache, const Tensor& grad_y,
                         Tensor& h, Tensor& W, Tensor& b);

/*! \brief Running batch statistics, one entry per feature. */
struct BatchNormState {
  Tensor running_mean;
  Tensor running_var;

  explicit BatchNormState(size_t features = 0);
};

struct BatchNormCache {
  std::vector<double> inv_std;
  Tensor x_hat;
};

/*! \brief Batch normalization over rows (eps 1e-5, momentum 0.1).
 *
 * Train mode normalizes by biased batch statistics and updates the running
 * stats; eval mode normalizes by the running stats. Train mode needs N ≥ 2.
 */
Tensor batchnorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, BatchNormState& state,
                 bool train, BatchNormCache* cache = nullptr);
void batchnorm_backward(const BatchNormCache& cache, const Tensor& grad_y, Tensor& x,
                        Tensor& gamma, Tensor& beta);

Tensor relu(const Tensor& x);
void relu_backward(const Tensor& grad_y, Tensor& x);

/*! \brief Valid (no padding) strided 1-D convolution of x [N×1×T]. */
Tensor conv1d(const Tensor& x, const Tensor& kernel, const Tensor& bias, size_t stride);
void conv1d_backward(const Tensor& grad_y, size_t stride, Tensor& x, Tensor& kernel, Tensor& bias);

struct ReadoutCache {
  std::vector<uint32_t> argmax;  // [G×F], ties to the lowest node index
};

/*! \brief Per-graph concat(mean, max) readout: [V×F] -> [G×2F]. */
Tensor readout_mean_max(const GraphBatch& g, const Tensor& h, ReadoutCache* cache = nullptr);
void readout_mean_max_backward(const GraphBatch& g, const ReadoutCache& cache,
                               const Tensor& grad_y, Tensor& h);

/*! \brief Column-wise concatenation [N×A] ++ [N×B] -> [N×(A+B)]. */
Tensor concat_cols(const Tensor& a, const Tensor& b);
void concat_cols_backward(const Tensor& grad_y, Tensor& a, Tensor& b);

/*! \brief Mean squared error over equal-length vectors. */
double mse_loss(const Tensor& pred, const Tensor& target);
void mse_loss_backward(Tensor& pred, const Tensor& target);

/*! \brief Adam moments for one parameter group; lr is per group. */
struct AdamState {
  uint64_t step{0};
  double lr{0.01};
  double beta1{0.9};
  double beta2{0.999};
  double eps{1e-8};
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/*! \brief One bias-corrected Adam update from the accumulated gradients. */
void adam_step(const std::vector<Tensor*>& params, AdamState& state);

/*! \brief Writes named tensors and metadata as a hex-float text manifest. */
void write_checkpoint(const std::string& path,
                      const std::vector<std::pair<std::string, const Tensor*>>& tensors,
                      const std::map<std::string, std::string>& meta = {});

/*! \brief Restores tensors by name (shapes must match); returns the metadata. */
std::map<std::string, std::string> read_checkpoint(
    const std::string& path, const std::vector<std::pair<std::string, Tensor*>>& tensors);

}  // namespace aigforge::nn
