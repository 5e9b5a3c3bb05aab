#pragma once

#include <cmath>
#include <memory>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tabularnet/nn/tensor.hpp"

namespace tabularnet::nn {

/// One recorded primitive. Nodes own their forward value and a lazily
/// allocated gradient buffer; `backward_step` scatters this node's gradient
/// into its parents. Creation wires the DAG, `backward()` replays it.
class Node {
 public:
  virtual ~Node() = default;

  Tensor value;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;

  Tensor& ensure_grad() {
    if (grad_.numel() == 0) grad_ = Tensor(value.shape());
    return grad_;
  }
  bool has_grad() const { return grad_.numel() != 0; }
  Tensor& grad() { return ensure_grad(); }
  void zero_grad() {
    if (has_grad()) grad_.fill(0.0);
  }

  virtual void backward_step() {}

 protected:
  bool parent_needs(size_t i) const { return parents[i]->requires_grad; }
  Tensor& parent_grad(size_t i) { return parents[i]->ensure_grad(); }
  const Tensor& parent_value(size_t i) const { return parents[i]->value; }

 private:
  Tensor grad_;
};

/// Value handle; cheap to copy, shares the underlying node.
struct Var {
  std::shared_ptr<Node> node;

  Var() = default;
  explicit Var(std::shared_ptr<Node> n) : node(std::move(n)) {}

  const Tensor& val() const { return node->value; }
  Tensor& grad() const { return node->grad(); }
  bool defined() const { return node != nullptr; }
  int rows() const { return node->value.rows(); }
  int cols() const { return node->value.cols(); }
};

/// Leaf holding data that never receives gradient.
inline Var constant(Tensor t) {
  auto n = std::make_shared<Node>();
  n->value = std::move(t);
  n->requires_grad = false;
  return Var(std::move(n));
}

/// Leaf that accumulates gradient (model parameters, gradcheck inputs).
inline Var leaf(Tensor t) {
  auto n = std::make_shared<Node>();
  n->value = std::move(t);
  n->requires_grad = true;
  return Var(std::move(n));
}

namespace detail {

template <typename NodeT, typename... Parents>
Var make_op(NodeT&& op, Parents... parents) {
  auto n = std::make_shared<std::decay_t<NodeT>>(std::forward<NodeT>(op));
  (n->parents.push_back(parents.node), ...);
  for (const auto& p : n->parents) n->requires_grad = n->requires_grad || p->requires_grad;
  return Var(std::move(n));
}

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b))
    throw ModelError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                     b.shape_str());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise arithmetic

struct AddNode : Node {
  void backward_step() override {
    const Tensor& g = grad();
    for (size_t p = 0; p < parents.size(); ++p) {
      if (!parent_needs(p)) continue;
      Tensor& pg = parent_grad(p);
      for (std::int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i];
    }
  }
};

inline Var add(const Var& a, const Var& b) {
  detail::check_same_shape(a.val(), b.val(), "add");
  AddNode op;
  op.value = a.val();
  for (std::int64_t i = 0; i < op.value.numel(); ++i) op.value[i] += b.val()[i];
  return detail::make_op(std::move(op), a, b);
}

struct SubNode : Node {
  void backward_step() override {
    const Tensor& g = grad();
    if (parent_needs(0)) {
      Tensor& pg = parent_grad(0);
      for (std::int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i];
    }
    if (parent_needs(1)) {
      Tensor& pg = parent_grad(1);
      for (std::int64_t i = 0; i < g.numel(); ++i) pg[i] -= g[i];
    }
  }
};

inline Var sub(const Var& a, const Var& b) {
  detail::check_same_shape(a.val(), b.val(), "sub");
  SubNode op;
  op.value = a.val();
  for (std::int64_t i = 0; i < op.value.numel(); ++i) op.value[i] -= b.val()[i];
  return detail::make_op(std::move(op), a, b);
}

struct MulNode : Node {
  void backward_step() override {
    const Tensor& g = grad();
    const Tensor& a = parent_value(0);
    const Tensor& b = parent_value(1);
    if (parent_needs(0)) {
      Tensor& pg = parent_grad(0);
      for (std::int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i] * b[i];
    }
    if (parent_needs(1)) {
      Tensor& pg = parent_grad(1);
      for (std::int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i] * a[i];
    }
  }
};

inline Var mul(const Var& a, const Var& b) {
  detail::check_same_shape(a.val(), b.val(), "mul");
  MulNode op;
  op.value = a.val();
  for (std::int64_t i = 0; i < op.value.numel(); ++i) op.value[i] *= b.val()[i];
  return detail::make_op(std::move(op), a, b);
}

struct ScaleNode : Node {
  double factor = 1.0;
  void backward_step() override {
    if (!parent_needs(0)) return;
    const Tensor& g = grad();
    Tensor& pg = parent_grad(0);
    for (std::int64_t i = 0; i < g.numel(); ++i) pg[i] += factor * g[i];
  }
};

inline Var scale(const Var& a, double factor) {
  ScaleNode op;
  op.factor = factor;
  op.value = a.val();
  for (std::int64_t i = 0; i < op.value.numel(); ++i) op.value[i] *= factor;
  return detail::make_op(std::move(op), a);
}

/// Broadcast-multiply by a single-element tensor (a learnable scalar).
struct ScalarMulNode : Node {
  void backward_step() override {
    const Tensor& g = grad();
    const Tensor& a = parent_value(0);
    const double s = parent_value(1)[0];
    if (parent_needs(0)) {
      Tensor& pg = parent_grad(0);
      for (std::int64_t i = 0; i < g.numel(); ++i) pg[i] += s * g[i];
    }
    if (parent_needs(1)) {
      double acc = 0.0;
      for (std::int64_t i = 0; i < g.numel(); ++i) acc += g[i] * a[i];
      parent_grad(1)[0] += acc;
    }
  }
};

inline Var scalar_mul(const Var& a, const Var& s) {
  if (!s.val().is_scalar()) throw ModelError("scalar_mul: multiplier must have one element");
  ScalarMulNode op;
  op.value = a.val();
  const double f = s.val()[0];
  for (std::int64_t i = 0; i < op.value.numel(); ++i) op.value[i] *= f;
  return detail::make_op(std::move(op), a, s);
}

/// (M x N) plus a length-N vector broadcast over rows.
struct AddRowVecNode : Node {
  void backward_step() override {
    const Tensor& g = grad();
    const int m = g.rows(), n = g.cols();
    if (parent_needs(0)) {
      Tensor& pg = parent_grad(0);
      for (std::int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i];
    }
    if (parent_needs(1)) {
      Tensor& pg = parent_grad(1);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) pg[j] += g(i, j);
    }
  }
};

inline Var add_rowvec(const Var& a, const Var& v) {
  if (a.cols() != static_cast<int>(v.val().numel()))
    throw ModelError("add_rowvec: width mismatch " + a.val().shape_str() + " vs " +
                     v.val().shape_str());
  AddRowVecNode op;
  op.value = a.val();
  const int m = op.value.rows(), n = op.value.cols();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) op.value(i, j) += v.val()[j];
  return detail::make_op(std::move(op), a, v);
}

// ---------------------------------------------------------------------------
// Matrix multiply

struct MatMulNode : Node {
  void backward_step() override {
    const Tensor& g = grad();
    const Tensor& a = parent_value(0);
    const Tensor& b = parent_value(1);
    const int m = a.rows(), k = a.cols(), n = b.cols();
    if (parent_needs(0))
      kernels::mm_abt_acc(parent_grad(0).data(), g.data(), b.data(), m, n, k);
    if (parent_needs(1))
      kernels::mm_atb_acc(parent_grad(1).data(), a.data(), g.data(), m, k, n);
  }
};

inline Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows())
    throw ModelError("matmul: inner dims " + a.val().shape_str() + " vs " + b.val().shape_str());
  MatMulNode op;
  op.value = Tensor::zeros(a.rows(), b.cols());
  kernels::mm_acc(op.value.data(), a.val().data(), b.val().data(), a.rows(), a.cols(), b.cols());
  return detail::make_op(std::move(op), a, b);
}

// ---------------------------------------------------------------------------
// Activations

struct ReluNode : Node {
  void backward_step() override {
    if (!parent_needs(0)) return;
    const Tensor& g = grad();
    Tensor& pg = parent_grad(0);
    for (std::int64_t i = 0; i < g.numel(); ++i)
      if (value[i] > 0.0) pg[i] += g[i];
  }
};

inline Var relu(const Var& a) {
  ReluNode op;
  op.value = a.val();
  for (std::int64_t i = 0; i < op.value.numel(); ++i)
    if (op.value[i] < 0.0) op.value[i] = 0.0;
  return detail::make_op(std::move(op), a);
}

struct SigmoidNode : Node {
  void backward_step() override {
    if (!parent_needs(0)) return;
    const Tensor& g = grad();
    Tensor& pg = parent_grad(0);
    for (std::int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i] * value[i] * (1.0 - value[i]);
  }
};

inline Var sigmoid(const Var& a) {
  SigmoidNode op;
  op.value = a.val();
  for (std::int64_t i = 0; i < op.value.numel(); ++i)
    op.value[i] = 1.0 / (1.0 + std::exp(-op.value[i]));
  return detail::make_op(std::move(op), a);
}

struct TanhNode : Node {
  void backward_step() override {
    if (!parent_needs(0)) return;
    const Tensor& g = grad();
    Tensor& pg = parent_grad(0);
    for (std::int64_t i = 0; i < g.numel(); ++i) pg[i] += g[i] * (1.0 - value[i] * value[i]);
  }
};

inline Var tanh(const Var& a) {
  TanhNode op;
  op.value = a.val();
  for (std::int64_t i = 0; i < op.value.numel(); ++i) op.value[i] = std::tanh(op.value[i]);
  return detail::make_op(std::move(op), a);
}

// ---------------------------------------------------------------------------
// Shape surgery

struct ConcatColsNode : Node {
  std::vector<int> widths;
  void backward_step() override {
    const Tensor& g = grad();
    const int m = g.rows(), total = g.cols();
    int off = 0;
    for (size_t p = 0; p < parents.size(); ++p) {
      const int w = widths[p];
      if (parent_needs(p)) {
        Tensor& pg = parent_grad(p);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < w; ++j) pg(i, j) += g.data()[static_cast<size_t>(i) * total + off + j];
      }
      off += w;
    }
  }
};

inline Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ModelError("concat_cols: no inputs");
  const int m = parts[0].rows();
  int total = 0;
  for (const Var& p : parts) {
    if (p.rows() != m) throw ModelError("concat_cols: row count mismatch");
    total += p.cols();
  }
  ConcatColsNode op;
  op.value = Tensor::zeros(m, total);
  int off = 0;
  for (const Var& p : parts) {
    const int w = p.cols();
    op.widths.push_back(w);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < w; ++j) op.value(i, off + j) = p.val()(i, j);
    off += w;
  }
  auto n = std::make_shared<ConcatColsNode>(std::move(op));
  for (const Var& p : parts) {
    n->parents.push_back(p.node);
    n->requires_grad = n->requires_grad || p.node->requires_grad;
  }
  return Var(std::move(n));
}

struct ConcatRowsNode : Node {
  std::vector<int> heights;
  void backward_step() override {
    const Tensor& g = grad();
    const int n = g.cols();
    int off = 0;
    for (size_t p = 0; p < parents.size(); ++p) {
      const int h = heights[p];
      if (parent_needs(p)) {
        Tensor& pg = parent_grad(p);
        for (int i = 0; i < h; ++i)
          for (int j = 0; j < n; ++j) pg(i, j) += g(off + i, j);
      }
      off += h;
    }
  }
};

inline Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ModelError("concat_rows: no inputs");
  const int n = parts[0].cols();
  int total = 0;
  for (const Var& p : parts) {
    if (p.cols() != n) throw ModelError("concat_rows: col count mismatch");
    total += p.rows();
  }
  ConcatRowsNode op;
  op.value = Tensor::zeros(total, n);
  int off = 0;
  for (const Var& p : parts) {
    op.heights.push_back(p.rows());
    for (int i = 0; i < p.rows(); ++i)
      for (int j = 0; j < n; ++j) op.value(off + i, j) = p.val()(i, j);
    off += p.rows();
  }
  auto node = std::make_shared<ConcatRowsNode>(std::move(op));
  for (const Var& p : parts) {
    node->parents.push_back(p.node);
    node->requires_grad = node->requires_grad || p.node->requires_grad;
  }
  return Var(std::move(node));
}

struct SliceColsNode : Node {
  int begin = 0;
  void backward_step() override {
    if (!parent_needs(0)) return;
    const Tensor& g = grad();
    Tensor& pg = parent_grad(0);
    const int m = g.rows(), w = g.cols(), src_w = pg.cols();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < w; ++j) pg.data()[static_cast<size_t>(i) * src_w + begin + j] += g(i, j);
  }
};

inline Var slice_cols(const Var& a, int begin, int end) {
  if (begin < 0 || end > a.cols() || begin >= end) throw ModelError("slice_cols: bad range");
  SliceColsNode op;
  op.begin = begin;
  op.value = Tensor::zeros(a.rows(), end - begin);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = begin; j < end; ++j) op.value(i, j - begin) = a.val()(i, j);
  return detail::make_op(std::move(op), a);
}

struct GatherRowsNode : Node {
  std::vector<int> indices;
  void backward_step() override {
    if (!parent_needs(0)) return;
    const Tensor& g = grad();
    Tensor& pg = parent_grad(0);
    const int n = g.cols();
    for (size_t i = 0; i < indices.size(); ++i) {
      double* dst = pg.data() + static_cast<size_t>(indices[i]) * n;
      const double* src = g.data() + i * n;
      for (int j = 0; j < n; ++j) dst[j] += src[j];
    }
  }
};

inline Var gather_rows(const Var& a, std::vector<int> indices) {
  const int m = a.rows(), n = a.cols();
  GatherRowsNode op;
  op.value = Tensor::zeros(static_cast<int>(indices.size()), n);
  for (size_t i = 0; i < indices.size(); ++i) {
    const int r = indices[i];
    if (r < 0 || r >= m) throw ModelError("gather_rows: index out of range");
    const double* src = a.val().data() + static_cast<size_t>(r) * n;
    double* dst = op.value.data() + i * n;
    for (int j = 0; j < n; ++j) dst[j] = src[j];
  }
  op.indices = std::move(indices);
  return detail::make_op(std::move(op), a);
}

/// out[i] = sum of a[j] over j in adj[i]; the graph-aggregation primitive.
struct NeighborSumNode : Node {
  std::vector<std::vector<int>> adj;
  void backward_step() override {
    if (!parent_needs(0)) return;
    const Tensor& g = grad();
    Tensor& pg = parent_grad(0);
    const int n = g.cols();
    for (size_t i = 0; i < adj.size(); ++i) {
      const double* grow = g.data() + i * n;
      for (int j : adj[i]) {
        double* dst = pg.data() + static_cast<size_t>(j) * n;
        for (int t = 0; t < n; ++t) dst[t] += grow[t];
      }
    }
  }
};

inline Var neighbor_sum(const Var& a, std::vector<std::vector<int>> adj) {
  const int m = a.rows(), n = a.cols();
  if (static_cast<int>(adj.size()) != m) throw ModelError("neighbor_sum: adjacency size mismatch");
  NeighborSumNode op;
  op.value = Tensor::zeros(m, n);
  for (int i = 0; i < m; ++i) {
    double* dst = op.value.data() + static_cast<size_t>(i) * n;
    for (int j : adj[i]) {
      if (j < 0 || j >= m) throw ModelError("neighbor_sum: neighbor index out of range");
      const double* src = a.val().data() + static_cast<size_t>(j) * n;
      for (int t = 0; t < n; ++t) dst[t] += src[t];
    }
  }
  op.adj = std::move(adj);
  return detail::make_op(std::move(op), a);
}

// ---------------------------------------------------------------------------
// Losses

/// Numerically stable row-wise log-softmax.
struct LogSoftmaxNode : Node {
  void backward_step() override {
    if (!parent_needs(0)) return;
    const Tensor& g = grad();
    Tensor& pg = parent_grad(0);
    const int m = g.rows(), n = g.cols();
    for (int i = 0; i < m; ++i) {
      double gsum = 0.0;
      for (int j = 0; j < n; ++j) gsum += g(i, j);
      for (int j = 0; j < n; ++j) pg(i, j) += g(i, j) - std::exp(value(i, j)) * gsum;
    }
  }
};

inline Var log_softmax_rows(const Var& a) {
  LogSoftmaxNode op;
  op.value = a.val();
  const int m = op.value.rows(), n = op.value.cols();
  for (int i = 0; i < m; ++i) {
    double mx = op.value(i, 0);
    for (int j = 1; j < n; ++j) mx = std::max(mx, op.value(i, j));
    double lse = 0.0;
    for (int j = 0; j < n; ++j) lse += std::exp(op.value(i, j) - mx);
    lse = mx + std::log(lse);
    for (int j = 0; j < n; ++j) op.value(i, j) -= lse;
  }
  return detail::make_op(std::move(op), a);
}

/// Mean negative log-likelihood of the target class per row; expects
/// log-softmax input.
struct NllMeanNode : Node {
  std::vector<int> targets;
  void backward_step() override {
    if (!parent_needs(0)) return;
    const double g = grad()[0];
    Tensor& pg = parent_grad(0);
    const double scale = g / static_cast<double>(targets.size());
    const int n = pg.cols();
    for (size_t i = 0; i < targets.size(); ++i)
      pg.data()[i * n + static_cast<size_t>(targets[i])] -= scale;
  }
};

inline Var nll_mean(const Var& log_probs, std::vector<int> targets) {
  const int m = log_probs.rows(), n = log_probs.cols();
  if (static_cast<int>(targets.size()) != m) throw ModelError("nll_mean: target count mismatch");
  NllMeanNode op;
  double loss = 0.0;
  for (int i = 0; i < m; ++i) {
    if (targets[static_cast<size_t>(i)] < 0 || targets[static_cast<size_t>(i)] >= n)
      throw ModelError("nll_mean: target class out of range");
    loss -= log_probs.val()(i, targets[static_cast<size_t>(i)]);
  }
  op.value = Tensor::scalar(loss / m);
  op.targets = std::move(targets);
  return detail::make_op(std::move(op), log_probs);
}

/// Class-weighted mean NLL: sum of w[y_i] * (-logp[i, y_i]) / sum of w[y_i].
struct NllClassWeightedNode : Node {
  std::vector<int> targets;
  std::vector<double> row_weights;
  double weight_sum = 0.0;
  void backward_step() override {
    if (!parent_needs(0)) return;
    const double g = grad()[0];
    Tensor& pg = parent_grad(0);
    const int n = pg.cols();
    for (size_t i = 0; i < targets.size(); ++i)
      pg.data()[i * n + static_cast<size_t>(targets[i])] -= g * row_weights[i] / weight_sum;
  }
};

inline Var nll_class_weighted(const Var& log_probs, std::vector<int> targets,
                              const std::vector<double>& class_weights) {
  const int m = log_probs.rows(), n = log_probs.cols();
  if (static_cast<int>(targets.size()) != m)
    throw ModelError("nll_class_weighted: target count mismatch");
  if (static_cast<int>(class_weights.size()) != n)
    throw ModelError("nll_class_weighted: weight count mismatch");
  NllClassWeightedNode op;
  double loss = 0.0, wsum = 0.0;
  op.row_weights.resize(targets.size());
  for (int i = 0; i < m; ++i) {
    const int y = targets[static_cast<size_t>(i)];
    if (y < 0 || y >= n) throw ModelError("nll_class_weighted: target class out of range");
    const double w = class_weights[static_cast<size_t>(y)];
    op.row_weights[static_cast<size_t>(i)] = w;
    wsum += w;
    loss -= w * log_probs.val()(i, y);
  }
  if (wsum <= 0.0) throw ModelError("nll_class_weighted: weights sum to zero");
  op.value = Tensor::scalar(loss / wsum);
  op.weight_sum = wsum;
  op.targets = std::move(targets);
  return detail::make_op(std::move(op), log_probs);
}

/// Fixed-weight contraction to a scalar; handy for building test losses.
struct WeightedSumNode : Node {
  Tensor weights;
  void backward_step() override {
    if (!parent_needs(0)) return;
    const double g = grad()[0];
    Tensor& pg = parent_grad(0);
    for (std::int64_t i = 0; i < pg.numel(); ++i) pg[i] += g * weights[i];
  }
};

inline Var weighted_sum(const Var& a, Tensor weights) {
  detail::check_same_shape(a.val(), weights, "weighted_sum");
  WeightedSumNode op;
  double acc = 0.0;
  for (std::int64_t i = 0; i < weights.numel(); ++i) acc += a.val()[i] * weights[i];
  op.value = Tensor::scalar(acc);
  op.weights = std::move(weights);
  return detail::make_op(std::move(op), a);
}

inline Var sum_all(const Var& a) {
  Tensor w(a.val().shape());
  w.fill(1.0);
  return weighted_sum(a, std::move(w));
}

// ---------------------------------------------------------------------------
// Reverse sweep

/// Reverse-mode gradients of a scalar loss. Parameters accumulate across
/// calls (batching); transient nodes start from fresh zero buffers.
inline void backward(const Var& loss) {
  if (!loss.defined() || !loss.val().is_scalar())
    throw ModelError("backward: loss must be a defined scalar");
  if (!loss.node->requires_grad) return;

  // Post-order DFS over grad-requiring parents; creation order alone is not
  // recoverable from the handle, so topological order is rebuilt here.
  std::vector<Node*> topo;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, size_t>> stack{{loss.node.get(), 0}};
  seen.insert(loss.node.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) stack.push_back({parent, 0});
    } else {
      topo.push_back(node);
      stack.pop_back();
    }
  }

  // Transient grads reset per sweep; leaf (parameter) grads accumulate so a
  // batch of per-table sweeps sums naturally.
  for (Node* n : topo)
    if (!n->parents.empty()) n->ensure_grad().fill(0.0);
  loss.node->ensure_grad()[0] = loss.node->parents.empty() ? loss.node->grad()[0] + 1.0 : 1.0;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    (*it)->ensure_grad();
    (*it)->backward_step();
  }
}

}  // namespace tabularnet::nn
