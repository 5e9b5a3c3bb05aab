#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "tabularnet/nn/autodiff.hpp"
#include "tabularnet/nn/tensor.hpp"
#include "tabularnet/rng.hpp"

namespace tabularnet::nn {

/// Entries i.i.d. normal(0, sqrt(2/(fan_in+fan_out))); deterministic per seed.
inline Tensor xavier_normal(const std::vector<int>& shape, int fan_in, int fan_out,
                            std::uint64_t seed) {
  if (fan_in <= 0 || fan_out <= 0) throw ModelError("xavier_normal: fans must be positive");
  Tensor t(shape);
  Rng rng(seed);
  const double std_dev = std::sqrt(2.0 / (fan_in + fan_out));
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = std_dev * rng.normal();
  return t;
}

/// A named learnable tensor plus its AdamW moment buffers.
struct Parameter {
  std::string name;
  Var var;
  Tensor m;  // first moment
  Tensor v;  // second moment
};

/// Registry of parameters in registration order. Registration order defines
/// checkpoint layout, so it must be deterministic.
class ParamStore {
 public:
  Var add(const std::string& name, Tensor init) {
    if (index_.count(name)) throw ModelError("duplicate parameter name '" + name + "'");
    Parameter p;
    p.name = name;
    p.m = Tensor(init.shape());
    p.v = Tensor(init.shape());
    p.var = leaf(std::move(init));
    index_[name] = params_.size();
    params_.push_back(std::move(p));
    return params_.back().var;
  }

  std::vector<Parameter>& all() { return params_; }
  const std::vector<Parameter>& all() const { return params_; }

  Parameter& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ModelError("unknown parameter '" + name + "'");
    return params_[it->second];
  }

  const Parameter& at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ModelError("unknown parameter '" + name + "'");
    return params_[it->second];
  }

  void zero_grad() {
    for (Parameter& p : params_) p.var.node->zero_grad();
  }

  void scale_grads(double factor) {
    for (Parameter& p : params_) {
      Tensor& g = p.var.grad();
      for (std::int64_t i = 0; i < g.numel(); ++i) g[i] *= factor;
    }
  }

  std::int64_t total_size() const {
    std::int64_t n = 0;
    for (const Parameter& p : params_) n += p.var.val().numel();
    return n;
  }

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, size_t> index_;
};

/// Forward-pass context: dropout is active only while training.
struct FwdCtx {
  bool training = false;
  double dropout = 0.0;
  Rng* rng = nullptr;
};

/// Training mode zeroes entries with probability p and rescales survivors
/// by 1/(1-p); evaluation mode is the identity.
inline Var dropout(const Var& x, double p, bool training, Rng* rng) {
  if (p < 0.0 || p >= 1.0) throw ModelError("dropout: p must be in [0,1)");
  if (!training || p == 0.0) return x;
  if (!rng) throw ModelError("dropout: training mode needs an rng");
  Tensor mask(x.val().shape());
  const double keep = 1.0 / (1.0 - p);
  for (std::int64_t i = 0; i < mask.numel(); ++i) mask[i] = rng->bernoulli(p) ? 0.0 : keep;
  return mul(x, constant(std::move(mask)));
}

inline Var dropout(const Var& x, const FwdCtx& ctx) {
  return dropout(x, ctx.dropout, ctx.training, ctx.rng);
}

enum class Activation { Relu, Identity };

/// Affine layers with ReLU between them; the final activation is ReLU for
/// embedding MLPs and identity for logit heads. Dropout follows each ReLU.
class Mlp {
 public:
  Mlp() = default;

  /// Weights are stored (in x out) so forward is a plain x*W.
  Mlp(ParamStore& store, const std::string& name, const std::vector<int>& dims,
      Activation final_act, std::uint64_t seed) : final_act_(final_act) {
    if (dims.size() < 2) throw ModelError("mlp '" + name + "': need at least one layer");
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
      const int in = dims[l], out = dims[l + 1];
      weights_.push_back(store.add(name + ".w" + std::to_string(l),
                                   xavier_normal({in, out}, in, out, seed + l)));
      biases_.push_back(store.add(name + ".b" + std::to_string(l), Tensor::zeros_vec(out)));
    }
  }

  Var forward(const Var& x, const FwdCtx& ctx = {}) const {
    Var h = x;
    for (size_t l = 0; l < weights_.size(); ++l) {
      h = add_rowvec(matmul(h, weights_[l]), biases_[l]);
      const bool last = l + 1 == weights_.size();
      if (!last || final_act_ == Activation::Relu) {
        h = relu(h);
        h = dropout(h, ctx);
      }
    }
    return h;
  }

  int layer_count() const { return static_cast<int>(weights_.size()); }
  const Var& weight(size_t l) const { return weights_[l]; }
  const Var& bias(size_t l) const { return biases_[l]; }

 private:
  std::vector<Var> weights_;
  std::vector<Var> biases_;
  Activation final_act_ = Activation::Relu;
};

/// One GRU direction. Gate layout along the 3H axis is [z | r | n]:
///   z = sigmoid(Wz x + Uz h + bz)
///   r = sigmoid(Wr x + Ur h + br)
///   n = tanh(Wn x + Un (r . h) + bn)
///   h' = (1 - z) . h + z . n
struct GruDirection {
  Var w_x;   // (in x 3H)
  Var u_zr;  // (H x 2H)
  Var u_n;   // (H x H)
  Var b;     // (3H)
  int hidden = 0;

  GruDirection() = default;

  GruDirection(ParamStore& store, const std::string& name, int in, int h, std::uint64_t seed)
      : hidden(h) {
    w_x = store.add(name + ".w_x", xavier_normal({in, 3 * h}, in, 3 * h, seed));
    u_zr = store.add(name + ".u_zr", xavier_normal({h, 2 * h}, h, 2 * h, seed + 1));
    u_n = store.add(name + ".u_n", xavier_normal({h, h}, h, h, seed + 2));
    b = store.add(name + ".b", Tensor::zeros_vec(3 * h));
  }

  /// Step where the input contribution (x W + b) is already computed.
  Var step_from_gates(const Var& gates, const Var& h_prev) const {
    const int h = hidden;
    Var zr = sigmoid(add(slice_cols(gates, 0, 2 * h), matmul(h_prev, u_zr)));
    Var z = slice_cols(zr, 0, h);
    Var r = slice_cols(zr, h, 2 * h);
    Var n = tanh(add(slice_cols(gates, 2 * h, 3 * h), matmul(mul(r, h_prev), u_n)));
    return add(h_prev, mul(z, sub(n, h_prev)));  // (1-z).h + z.n
  }

  Var step(const Var& x_t, const Var& h_prev) const {
    return step_from_gates(add_rowvec(matmul(x_t, w_x), b), h_prev);
  }
};

struct BiGruOutput {
  Var forward_states;   // (N x H) in input-row order
  Var backward_states;  // (N x H)
};

/// Stacked bidirectional GRU over equal-length sequences picked out of the
/// rows of X. `sequences[s][t]` is the row of X that sequence s holds at
/// time t. Initial states are zero; layer k consumes the concatenated
/// forward/backward outputs of layer k-1.
class BiGru {
 public:
  BiGru() = default;

  BiGru(ParamStore& store, const std::string& name, int input, int hidden, int n_layers,
        std::uint64_t seed) : hidden_(hidden) {
    int in = input;
    for (int l = 0; l < n_layers; ++l) {
      const std::string base = name + ".l" + std::to_string(l);
      fwd_.emplace_back(store, base + ".fwd", in, hidden, seed + 10 * l);
      bwd_.emplace_back(store, base + ".bwd", in, hidden, seed + 10 * l + 5);
      in = 2 * hidden;
    }
  }

  BiGruOutput run(const Var& x, const std::vector<std::vector<int>>& sequences) const {
    if (sequences.empty() || sequences[0].empty())
      throw ModelError("bigru: empty sequence set");
    const size_t t_len = sequences[0].size();
    size_t total = 0;
    for (const auto& s : sequences) {
      if (s.size() != t_len) throw ModelError("bigru: ragged sequences are not supported");
      total += s.size();
    }
    if (total != static_cast<size_t>(x.rows()))
      throw ModelError("bigru: sequences must cover every input row exactly once");

    Var cur = x;
    BiGruOutput out;
    for (size_t l = 0; l < fwd_.size(); ++l) {
      Var f = run_direction(fwd_[l], cur, sequences, /*reverse=*/false);
      Var b = run_direction(bwd_[l], cur, sequences, /*reverse=*/true);
      out.forward_states = f;
      out.backward_states = b;
      cur = concat_cols({f, b});
    }
    return out;
  }

  int hidden() const { return hidden_; }
  const GruDirection& direction(size_t layer, bool backward) const {
    return backward ? bwd_[layer] : fwd_[layer];
  }

 private:
  Var run_direction(const GruDirection& dir, const Var& x,
                    const std::vector<std::vector<int>>& sequences, bool reverse) const {
    const int batch = static_cast<int>(sequences.size());
    const int t_len = static_cast<int>(sequences[0].size());
    // Input transform for all cells at once; steps then only pay the
    // recurrent matmul.
    Var gates_all = add_rowvec(matmul(x, dir.w_x), dir.b);

    Var h = constant(Tensor::zeros(batch, dir.hidden));
    std::vector<Var> steps;
    steps.reserve(static_cast<size_t>(t_len));
    for (int tt = 0; tt < t_len; ++tt) {
      const int t = reverse ? t_len - 1 - tt : tt;
      std::vector<int> idx(static_cast<size_t>(batch));
      for (int s = 0; s < batch; ++s) idx[static_cast<size_t>(s)] = sequences[s][t];
      h = dir.step_from_gates(gather_rows(gates_all, std::move(idx)), h);
      steps.push_back(h);
    }
    // Stack is in processing order; permute back to input-row order.
    Var stacked = concat_rows(steps);
    std::vector<int> perm(static_cast<size_t>(x.rows()));
    for (int s = 0; s < batch; ++s)
      for (int t = 0; t < t_len; ++t) {
        const int processed_at = reverse ? t_len - 1 - t : t;
        perm[static_cast<size_t>(sequences[s][t])] = processed_at * batch + s;
      }
    return gather_rows(stacked, std::move(perm));
  }

  std::vector<GruDirection> fwd_;
  std::vector<GruDirection> bwd_;
  int hidden_ = 0;
};

}  // namespace tabularnet::nn
