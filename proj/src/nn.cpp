#include "aigforge/nn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aigforge::nn {

namespace {

using MatMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstMatMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

size_t numel(const std::vector<size_t>& shape) {
  size_t n = 1;
  for (const size_t d : shape) n *= d;
  return n;
}

ConstMatMap as_matrix(const Tensor& t, size_t rows, size_t cols) {
  return ConstMatMap(t.data.data(), static_cast<Eigen::Index>(rows),
                     static_cast<Eigen::Index>(cols));
}

MatMap grad_matrix(Tensor& t, size_t rows, size_t cols) {
  t.ensure_grad();
  return MatMap(t.grad.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

}  // namespace

Tensor::Tensor(std::vector<size_t> s, bool rg) : shape(std::move(s)), requires_grad(rg) {
  data.assign(numel(shape), 0.0);
  if (requires_grad) grad.assign(data.size(), 0.0);
}

Tensor Tensor::from(std::vector<size_t> s, std::vector<double> values, bool rg) {
  check(numel(s) == values.size(), "tensor: value count does not match shape");
  Tensor t;
  t.shape = std::move(s);
  t.data = std::move(values);
  t.requires_grad = rg;
  if (rg) t.grad.assign(t.data.size(), 0.0);
  return t;
}

void Tensor::ensure_grad() {
  if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
}

void Tensor::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

void GraphBatch::finalize() {
  check(node_to_graph.size() == num_nodes, "graph batch: node_to_graph size");
  check(graph_sizes.size() == num_graphs, "graph batch: graph_sizes size");
  size_t total = 0;
  for (const uint32_t n : graph_sizes) total += n;
  check(total == num_nodes, "graph batch: graph sizes do not sum to node count");

  degrees.assign(num_nodes, 0);
  std::vector<uint8_t> has_loop(num_nodes, 0);
  for (const auto& [s, d] : edges) {
    check(s < num_nodes && d < num_nodes, "graph batch: edge endpoint out of range");
    ++degrees[d];
    if (s == d) has_loop[s] = 1;
  }
  for (uint32_t v = 0; v < num_nodes; ++v) check(has_loop[v] != 0, "graph batch: missing self-loop");

  edge_norm.resize(edges.size());
  for (size_t e = 0; e < edges.size(); ++e) {
    const auto& [s, d] = edges[e];
    edge_norm[e] = 1.0 / (std::sqrt(static_cast<double>(degrees[s])) *
                          std::sqrt(static_cast<double>(degrees[d])));
  }
}

Tensor affine(const Tensor& x, const Tensor& W, const Tensor& b) {
  check(x.shape.size() == 2 && W.shape.size() == 2 && b.shape.size() == 1, "affine: ranks");
  const size_t n = x.dim(0), in = x.dim(1), out = W.dim(1);
  check(W.dim(0) == in && b.dim(0) == out, "affine: shape mismatch");

  Tensor y({n, out});
  MatMap ym(y.data.data(), n, out);
  ym.noalias() = as_matrix(x, n, in) * as_matrix(W, in, out);
  ym.rowwise() += as_matrix(b, 1, out).row(0);
  return y;
}

void affine_backward(const Tensor& grad_y, Tensor& x, Tensor& W, Tensor& b) {
  const size_t n = x.dim(0), in = x.dim(1), out = W.dim(1);
  check(grad_y.shape.size() == 2 && grad_y.dim(0) == n && grad_y.dim(1) == out,
        "affine backward: shape mismatch");
  const ConstMatMap gy = as_matrix(grad_y, n, out);
  if (x.requires_grad) grad_matrix(x, n, in).noalias() += gy * as_matrix(W, in, out).transpose();
  if (W.requires_grad) grad_matrix(W, in, out).noalias() += as_matrix(x, n, in).transpose() * gy;
  if (b.requires_grad) grad_matrix(b, 1, out).noalias() += gy.colwise().sum();
}

Tensor graph_conv(const GraphBatch& g, const Tensor& h, const Tensor& W, const Tensor& b,
                  GraphConvCache* cache) {
  check(h.shape.size() == 2 && h.dim(0) == g.num_nodes, "graph_conv: feature shape");
  check(g.edge_norm.size() == g.edges.size() && !g.degrees.empty(),
        "graph_conv: batch not finalized");
  const size_t f_in = h.dim(1);

  Tensor agg({g.num_nodes, f_in});
  for (size_t e = 0; e < g.edges.size(); ++e) {
    const auto& [s, d] = g.edges[e];
    const double w = g.edge_norm[e];
    const double* src = &h.data[s * f_in];
    double* dst = &agg.data[d * f_in];
    for (size_t f = 0; f < f_in; ++f) dst[f] += w * src[f];
  }

  Tensor y = affine(agg, W, b);
  if (cache) cache->agg = std::move(agg);
  return y;
}

void graph_conv_backward(const GraphBatch& g, const GraphConvCache& cache, const Tensor& grad_y,
                         Tensor& h, Tensor& W, Tensor& b) {
  const size_t f_in = W.dim(0), f_out = W.dim(1);
  const size_t v_cnt = g.num_nodes;
  check(cache.agg.dim(0) == v_cnt && cache.agg.dim(1) == f_in, "graph_conv backward: stale cache");
  check(grad_y.dim(0) == v_cnt && grad_y.dim(1) == f_out, "graph_conv backward: shape mismatch");

  const ConstMatMap gy = as_matrix(grad_y, v_cnt, f_out);
  if (W.requires_grad)
    grad_matrix(W, f_in, f_out).noalias() += as_matrix(cache.agg, v_cnt, f_in).transpose() * gy;
  if (b.requires_grad) grad_matrix(b, 1, f_out).noalias() += gy.colwise().sum();
  if (!h.requires_grad) return;

  std::vector<double> d_agg(v_cnt * f_in);
  MatMap(d_agg.data(), v_cnt, f_in).noalias() = gy * as_matrix(W, f_in, f_out).transpose();
  h.ensure_grad();
  for (size_t e = 0; e < g.edges.size(); ++e) {
    const auto& [s, d] = g.edges[e];
    const double w = g.edge_norm[e];
    const double* src = &d_agg[d * f_in];
    double* dst = &h.grad[s * f_in];
    for (size_t f = 0; f < f_in; ++f) dst[f] += w * src[f];
  }
}

BatchNormState::BatchNormState(size_t features)
    : running_mean({features}), running_var({features}) {
  std::fill(running_var.data.begin(), running_var.data.end(), 1.0);
}

Tensor batchnorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, BatchNormState& state,
                 bool train, BatchNormCache* cache) {
  constexpr double kEps = 1e-5;
  constexpr double kMomentum = 0.1;
  check(x.shape.size() == 2, "batchnorm: rank");
  const size_t n = x.dim(0), f_dim = x.dim(1);
  check(gamma.dim(0) == f_dim && beta.dim(0) == f_dim, "batchnorm: parameter shape");
  check(state.running_mean.dim(0) == f_dim, "batchnorm: state shape");
  check(!train || n >= 2, "batchnorm: train mode needs at least 2 rows");

  Tensor y({n, f_dim});
  std::vector<double> mean(f_dim, 0.0), var(f_dim, 0.0);
  if (train) {
    for (size_t i = 0; i < n; ++i)
      for (size_t f = 0; f < f_dim; ++f) mean[f] += x.at(i, f);
    for (size_t f = 0; f < f_dim; ++f) mean[f] /= static_cast<double>(n);
    for (size_t i = 0; i < n; ++i)
      for (size_t f = 0; f < f_dim; ++f) {
        const double d = x.at(i, f) - mean[f];
        var[f] += d * d;
      }
    for (size_t f = 0; f < f_dim; ++f) var[f] /= static_cast<double>(n);
    for (size_t f = 0; f < f_dim; ++f) {
      state.running_mean.data[f] = (1.0 - kMomentum) * state.running_mean.data[f] + kMomentum * mean[f];
      state.running_var.data[f] = (1.0 - kMomentum) * state.running_var.data[f] + kMomentum * var[f];
    }
  } else {
    mean = state.running_mean.data;
    var = state.running_var.data;
  }

  std::vector<double> inv_std(f_dim);
  for (size_t f = 0; f < f_dim; ++f) inv_std[f] = 1.0 / std::sqrt(var[f] + kEps);

  Tensor x_hat({n, f_dim});
  for (size_t i = 0; i < n; ++i)
    for (size_t f = 0; f < f_dim; ++f) {
      x_hat.at(i, f) = (x.at(i, f) - mean[f]) * inv_std[f];
      y.at(i, f) = gamma.data[f] * x_hat.at(i, f) + beta.data[f];
    }
  if (cache) {
    cache->inv_std = std::move(inv_std);
    cache->x_hat = std::move(x_hat);
  }
  return y;
}

void batchnorm_backward(const BatchNormCache& cache, const Tensor& grad_y, Tensor& x,
                        Tensor& gamma, Tensor& beta) {
  const size_t n = x.dim(0), f_dim = x.dim(1);
  check(cache.x_hat.dim(0) == n && cache.x_hat.dim(1) == f_dim, "batchnorm backward: stale cache");

  if (gamma.requires_grad) {
    gamma.ensure_grad();
    for (size_t i = 0; i < n; ++i)
      for (size_t f = 0; f < f_dim; ++f) gamma.grad[f] += grad_y.at(i, f) * cache.x_hat.at(i, f);
  }
  if (beta.requires_grad) {
    beta.ensure_grad();
    for (size_t i = 0; i < n; ++i)
      for (size_t f = 0; f < f_dim; ++f) beta.grad[f] += grad_y.at(i, f);
  }
  if (!x.requires_grad) return;

  x.ensure_grad();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (size_t f = 0; f < f_dim; ++f) {
    double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double dxh = grad_y.at(i, f) * gamma.data[f];
      sum_dxhat += dxh;
      sum_dxhat_xhat += dxh * cache.x_hat.at(i, f);
    }
    for (size_t i = 0; i < n; ++i) {
      const double dxh = grad_y.at(i, f) * gamma.data[f];
      x.grad[i * f_dim + f] +=
          cache.inv_std[f] * inv_n *
          (static_cast<double>(n) * dxh - sum_dxhat - cache.x_hat.at(i, f) * sum_dxhat_xhat);
    }
  }
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  y.requires_grad = false;
  y.grad.clear();
  for (double& v : y.data) v = v > 0.0 ? v : 0.0;
  return y;
}

void relu_backward(const Tensor& grad_y, Tensor& x) {
  if (!x.requires_grad) return;
  x.ensure_grad();
  check(grad_y.data.size() == x.data.size(), "relu backward: shape mismatch");
  for (size_t i = 0; i < x.data.size(); ++i)
    if (x.data[i] > 0.0) x.grad[i] += grad_y.data[i];
}

Tensor conv1d(const Tensor& x, const Tensor& kernel, const Tensor& bias, size_t stride) {
  check(x.shape.size() == 3 && x.dim(1) == 1, "conv1d: input must be [N×1×T]");
  check(kernel.shape.size() == 2 && kernel.dim(0) == 1, "conv1d: kernel must be [1×K]");
  check(bias.size() == 1, "conv1d: bias must be a scalar");
  check(stride >= 1, "conv1d: stride");
  const size_t n = x.dim(0), t_len = x.dim(2), k = kernel.dim(1);
  check(t_len >= k, "conv1d: input shorter than kernel");
  const size_t t_out = (t_len - k) / stride + 1;

  Tensor y({n, 1, t_out});
  for (size_t i = 0; i < n; ++i) {
    const double* row = &x.data[i * t_len];
    double* out = &y.data[i * t_out];
    for (size_t j = 0; j < t_out; ++j) {
      double acc = bias.data[0];
      for (size_t l = 0; l < k; ++l) acc += row[j * stride + l] * kernel.data[l];
      out[j] = acc;
    }
  }
  return y;
}

void conv1d_backward(const Tensor& grad_y, size_t stride, Tensor& x, Tensor& kernel,
                     Tensor& bias) {
  const size_t n = x.dim(0), t_len = x.dim(2), k = kernel.dim(1);
  const size_t t_out = (t_len - k) / stride + 1;
  check(grad_y.data.size() == n * t_out, "conv1d backward: shape mismatch");

  if (bias.requires_grad) {
    bias.ensure_grad();
    for (const double g : grad_y.data) bias.grad[0] += g;
  }
  if (kernel.requires_grad) kernel.ensure_grad();
  if (x.requires_grad) x.ensure_grad();
  for (size_t i = 0; i < n; ++i) {
    const double* row = &x.data[i * t_len];
    const double* gy = &grad_y.data[i * t_out];
    for (size_t j = 0; j < t_out; ++j) {
      for (size_t l = 0; l < k; ++l) {
        if (kernel.requires_grad) kernel.grad[l] += gy[j] * row[j * stride + l];
        if (x.requires_grad) x.grad[i * t_len + j * stride + l] += gy[j] * kernel.data[l];
      }
    }
  }
}

Tensor readout_mean_max(const GraphBatch& g, const Tensor& h, ReadoutCache* cache) {
  check(h.shape.size() == 2 && h.dim(0) == g.num_nodes, "readout: feature shape");
  const size_t f_dim = h.dim(1);
  for (const uint32_t n : g.graph_sizes) check(n > 0, "readout: empty graph");

  Tensor y({g.num_graphs, 2 * f_dim});
  std::vector<uint32_t> argmax(g.num_graphs * f_dim, UINT32_MAX);
  for (uint32_t v = 0; v < g.num_nodes; ++v) {
    const uint32_t gid = g.node_to_graph[v];
    for (size_t f = 0; f < f_dim; ++f) {
      const double val = h.at(v, f);
      y.at(gid, f) += val;
      uint32_t& best = argmax[gid * f_dim + f];
      if (best == UINT32_MAX || val > h.at(best, f)) {
        best = v;
        y.at(gid, f_dim + f) = val;
      }
    }
  }
  for (uint32_t gid = 0; gid < g.num_graphs; ++gid)
    for (size_t f = 0; f < f_dim; ++f) y.at(gid, f) /= static_cast<double>(g.graph_sizes[gid]);
  if (cache) cache->argmax = std::move(argmax);
  return y;
}

void readout_mean_max_backward(const GraphBatch& g, const ReadoutCache& cache,
                               const Tensor& grad_y, Tensor& h) {
  if (!h.requires_grad) return;
  h.ensure_grad();
  const size_t f_dim = h.dim(1);
  check(cache.argmax.size() == g.num_graphs * f_dim, "readout backward: stale cache");

  for (uint32_t v = 0; v < g.num_nodes; ++v) {
    const uint32_t gid = g.node_to_graph[v];
    const double inv = 1.0 / static_cast<double>(g.graph_sizes[gid]);
    for (size_t f = 0; f < f_dim; ++f) h.grad[v * f_dim + f] += grad_y.at(gid, f) * inv;
  }
  for (uint32_t gid = 0; gid < g.num_graphs; ++gid)
    for (size_t f = 0; f < f_dim; ++f)
      h.grad[cache.argmax[gid * f_dim + f] * f_dim + f] += grad_y.at(gid, f_dim + f);
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  check(a.shape.size() == 2 && b.shape.size() == 2 && a.dim(0) == b.dim(0),
        "concat: row mismatch");
  const size_t n = a.dim(0), ca = a.dim(1), cb = b.dim(1);
  Tensor y({n, ca + cb});
  for (size_t i = 0; i < n; ++i) {
    std::copy_n(&a.data[i * ca], ca, &y.data[i * (ca + cb)]);
    std::copy_n(&b.data[i * cb], cb, &y.data[i * (ca + cb) + ca]);
  }
  return y;
}

void concat_cols_backward(const Tensor& grad_y, Tensor& a, Tensor& b) {
  const size_t n = a.dim(0), ca = a.dim(1), cb = b.dim(1);
  check(grad_y.data.size() == n * (ca + cb), "concat backward: shape mismatch");
  if (a.requires_grad) {
    a.ensure_grad();
    for (size_t i = 0; i < n; ++i)
      for (size_t c = 0; c < ca; ++c) a.grad[i * ca + c] += grad_y.data[i * (ca + cb) + c];
  }
  if (b.requires_grad) {
    b.ensure_grad();
    for (size_t i = 0; i < n; ++i)
      for (size_t c = 0; c < cb; ++c) b.grad[i * cb + c] += grad_y.data[i * (ca + cb) + ca + c];
  }
}

double mse_loss(const Tensor& pred, const Tensor& target) {
  check(pred.data.size() == target.data.size() && !pred.data.empty(), "mse: length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < pred.data.size(); ++i) {
    const double d = pred.data[i] - target.data[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.data.size());
}

void mse_loss_backward(Tensor& pred, const Tensor& target) {
  check(pred.data.size() == target.data.size() && !pred.data.empty(), "mse: length mismatch");
  pred.ensure_grad();
  const double scale = 2.0 / static_cast<double>(pred.data.size());
  for (size_t i = 0; i < pred.data.size(); ++i)
    pred.grad[i] += scale * (pred.data[i] - target.data[i]);
}

void adam_step(const std::vector<Tensor*>& params, AdamState& state) {
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (size_t p = 0; p < params.size(); ++p) {
      state.m[p].assign(params[p]->data.size(), 0.0);
      state.v[p].assign(params[p]->data.size(), 0.0);
    }
  }
  check(state.m.size() == params.size(), "adam: group size changed");
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t p = 0; p < params.size(); ++p) {
    Tensor& t = *params[p];
    t.ensure_grad();
    check(state.m[p].size() == t.data.size(), "adam: parameter shape changed");
    for (size_t i = 0; i < t.data.size(); ++i) {
      const double g = t.grad[i];
      state.m[p][i] = state.beta1 * state.m[p][i] + (1.0 - state.beta1) * g;
      state.v[p][i] = state.beta2 * state.v[p][i] + (1.0 - state.beta2) * g * g;
      const double m_hat = state.m[p][i] / bc1;
      const double v_hat = state.v[p][i] / bc2;
      t.data[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

void write_checkpoint(const std::string& path,
                      const std::vector<std::pair<std::string, const Tensor*>>& tensors,
                      const std::map<std::string, std::string>& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out << "aigforge-ckpt 1\n";
  for (const auto& [key, value] : meta) {
    check(key.find_first_of(" \t\n") == std::string::npos, "checkpoint: meta key has whitespace");
    check(value.find('\n') == std::string::npos, "checkpoint: meta value has a newline");
    out << "meta " << key << " " << value << "\n";
  }
  char buf[48];
  for (const auto& [name, t] : tensors) {
    check(name.find_first_of(" \t\n") == std::string::npos, "checkpoint: name has whitespace");
    out << "tensor " << name << " " << t->shape.size();
    for (const size_t d : t->shape) out << " " << d;
    out << "\n";
    for (size_t i = 0; i < t->data.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%a", t->data[i]);
      out << (i ? " " : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::map<std::string, std::string> read_checkpoint(
    const std::string& path, const std::vector<std::pair<std::string, Tensor*>>& tensors) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != "aigforge-ckpt 1")
    throw std::runtime_error("checkpoint: bad header in " + path);

  std::map<std::string, Tensor*> by_name;
  for (const auto& [name, t] : tensors) by_name.emplace(name, t);
  std::map<std::string, std::string> meta;
  size_t restored = 0;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "meta") {
      std::string key;
      ls >> key;
      std::string value;
      std::getline(ls, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      meta[key] = value;
      continue;
    }
    if (kind != "tensor") throw std::runtime_error("checkpoint: unexpected line: " + line);
    std::string name;
    size_t ndim = 0;
    ls >> name >> ndim;
    std::vector<size_t> shape(ndim);
    for (size_t i = 0; i < ndim; ++i) ls >> shape[i];
    if (!ls) throw std::runtime_error("checkpoint: bad tensor header: " + line);

    const auto it = by_name.find(name);
    if (it == by_name.end()) throw std::runtime_error("checkpoint: unknown tensor " + name);
    Tensor& t = *it->second;
    if (t.shape != shape) throw std::runtime_error("checkpoint: shape mismatch for " + name);

    if (!std::getline(in, line)) throw std::runtime_error("checkpoint: missing values for " + name);
    std::istringstream vs(line);
    std::string tok;
    for (size_t i = 0; i < t.data.size(); ++i) {
      if (!(vs >> tok)) throw std::runtime_error("checkpoint: short value row for " + name);
      t.data[i] = std::strtod(tok.c_str(), nullptr);
    }
    ++restored;
  }
  if (restored != tensors.size())
    throw std::runtime_error("checkpoint: missing tensors in " + path);
  return meta;
}

}  // namespace aigforge::nn
