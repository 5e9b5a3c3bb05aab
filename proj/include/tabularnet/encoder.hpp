#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tabularnet/cell_graph.hpp"
#include "tabularnet/features.hpp"
#include "tabularnet/nn/layers.hpp"

namespace tabularnet {

enum class TaskKind { Cell, Region, Multi };

inline const char* task_name(TaskKind t) {
  switch (t) {
    case TaskKind::Cell: return "cell";
    case TaskKind::Region: return "region";
    case TaskKind::Multi: return "multi";
  }
  return "cell";
}

inline std::optional<TaskKind> task_from_name(std::string_view s) {
  if (s == "cell") return TaskKind::Cell;
  if (s == "region") return TaskKind::Region;
  if (s == "multi") return TaskKind::Multi;
  return std::nullopt;
}

struct EncoderConfig {
  int input_dim = 116;   // 52 handcrafted + embedding width
  int gru_hidden = 128;  // per direction
  int gru_layers = 3;
  int fuse_dim = 128;    // output of each directional fusion projection
  int pool_dim = 128;
  int gin_hidden = 128;
  int gin_layers = 2;
  int head_hidden = 128;
  int stack_layers = 1;
  double dropout = 0.3;
  bool use_bigru = true;  // ablation switches
  bool use_gin = true;

  int hg_width() const { return 2 * fuse_dim; }
  int hs_width() const { return (use_bigru ? hg_width() : 0) + 2 * pool_dim; }
  int cell_width() const { return hs_width() + (use_gin ? gin_hidden : 0); }

  void check() const {
    if (input_dim <= 0 || gru_hidden <= 0 || gru_layers <= 0 || fuse_dim <= 0 || pool_dim <= 0 ||
        gin_hidden <= 0 || gin_layers <= 0 || head_hidden <= 0 || stack_layers <= 0)
      throw ModelError("encoder config: all dims and depths must be positive");
    if (dropout < 0.0 || dropout >= 1.0) throw ModelError("encoder config: dropout must be in [0,1)");
    if (!use_bigru && !use_gin)
      throw ModelError("encoder config: at least one of Bi-GRU and GIN must stay enabled");
  }
};

/// Per-cell embeddings of one encoded table; `h` is the final representation
/// h = h_s (+) h_rel, rows in cell-major order.
struct CellEmbeddings {
  nn::Var hg;    // (N x 2*fuse)     fused row/col Bi-GRU state
  nn::Var r;     // (N_r x pool)     row pooling embeddings
  nn::Var c;     // (N_c x pool)     column pooling embeddings
  nn::Var hs;    // (N x hs_width)   spatial embedding
  nn::Var hrel;  // (N x gin_hidden) relational embedding
  nn::Var h;     // (N x cell_width)
};

struct EncodedTable {
  CellEmbeddings cells;
  nn::Var row_emb;  // (N_r x cell_width) mean-pooled rows
  nn::Var col_emb;  // (N_c x cell_width)
  nn::Var cell_logp;  // (N x 5) log-probabilities, if the cell head exists
  nn::Var row_logp;   // (N_r x 2), if the region heads exist
  nn::Var col_logp;   // (N_c x 2)
};

namespace detail {

/// Constant averaging / broadcast matrices that implement the row- and
/// column-pooling sums; being constants, gradients flow through matmul only
/// into the pooled values.
struct PoolingMats {
  nn::Var row_mean;   // (N_r x N)
  nn::Var col_mean;   // (N_c x N)
  nn::Var row_cast;   // (N x N_r)
  nn::Var col_cast;   // (N x N_c)
};

inline PoolingMats make_pooling(int n_rows, int n_cols) {
  const int n = n_rows * n_cols;
  nn::Tensor rm = nn::Tensor::zeros(n_rows, n);
  nn::Tensor cm = nn::Tensor::zeros(n_cols, n);
  nn::Tensor rc = nn::Tensor::zeros(n, n_rows);
  nn::Tensor cc = nn::Tensor::zeros(n, n_cols);
  for (int i = 0; i < n_rows; ++i)
    for (int j = 0; j < n_cols; ++j) {
      const int flat = i * n_cols + j;
      rm(i, flat) = 1.0 / n_cols;
      cm(j, flat) = 1.0 / n_rows;
      rc(flat, i) = 1.0;
      cc(flat, j) = 1.0;
    }
  return {nn::constant(std::move(rm)), nn::constant(std::move(cm)), nn::constant(std::move(rc)),
          nn::constant(std::move(cc))};
}

inline std::vector<std::vector<int>> row_sequences(int n_rows, int n_cols) {
  std::vector<std::vector<int>> seqs(static_cast<size_t>(n_rows));
  for (int i = 0; i < n_rows; ++i) {
    seqs[static_cast<size_t>(i)].resize(static_cast<size_t>(n_cols));
    for (int j = 0; j < n_cols; ++j) seqs[static_cast<size_t>(i)][static_cast<size_t>(j)] = i * n_cols + j;
  }
  return seqs;
}

inline std::vector<std::vector<int>> col_sequences(int n_rows, int n_cols) {
  std::vector<std::vector<int>> seqs(static_cast<size_t>(n_cols));
  for (int j = 0; j < n_cols; ++j) {
    seqs[static_cast<size_t>(j)].resize(static_cast<size_t>(n_rows));
    for (int i = 0; i < n_rows; ++i) seqs[static_cast<size_t>(j)][static_cast<size_t>(i)] = i * n_cols + j;
  }
  return seqs;
}

}  // namespace detail

/// One structure information mining layer: row/column Bi-GRUs fused per
/// cell, shared-MLP row/column average pooling and a GIN over the cell
/// graph, concatenated per cell.
class StructureLayer {
 public:
  StructureLayer() = default;

  StructureLayer(nn::ParamStore& store, const std::string& name, const EncoderConfig& cfg,
                 int input_dim, std::uint64_t seed)
      : cfg_(cfg), input_dim_(input_dim) {
    using nn::Activation;
    if (cfg.use_bigru) {
      row_gru_ = nn::BiGru(store, name + ".row_gru", input_dim, cfg.gru_hidden, cfg.gru_layers, seed);
      col_gru_ = nn::BiGru(store, name + ".col_gru", input_dim, cfg.gru_hidden, cfg.gru_layers,
                           seed + 100);
      fuse_row_w_ = store.add(name + ".fuse_row.w", nn::xavier_normal({2 * cfg.gru_hidden, cfg.fuse_dim},
                                                                      2 * cfg.gru_hidden, cfg.fuse_dim,
                                                                      seed + 200));
      fuse_row_b_ = store.add(name + ".fuse_row.b", nn::Tensor::zeros_vec(cfg.fuse_dim));
      fuse_col_w_ = store.add(name + ".fuse_col.w", nn::xavier_normal({2 * cfg.gru_hidden, cfg.fuse_dim},
                                                                      2 * cfg.gru_hidden, cfg.fuse_dim,
                                                                      seed + 201));
      fuse_col_b_ = store.add(name + ".fuse_col.b", nn::Tensor::zeros_vec(cfg.fuse_dim));
    }
    pool_mlp_ = nn::Mlp(store, name + ".pool", {input_dim, cfg.pool_dim}, Activation::Relu, seed + 300);
    if (cfg.use_gin) {
      gin_lift_ = nn::Mlp(store, name + ".gin.lift", {input_dim, cfg.gin_hidden}, Activation::Relu,
                          seed + 400);
      for (int k = 0; k < cfg.gin_layers; ++k) {
        gin_eps_.push_back(store.add(name + ".gin.eps" + std::to_string(k), nn::Tensor::scalar(0.0)));
        gin_update_.emplace_back(store, name + ".gin.update" + std::to_string(k),
                                 std::vector<int>{cfg.gin_hidden, cfg.gin_hidden, cfg.gin_hidden},
                                 Activation::Relu, seed + 500 + 10 * k);
      }
    }
  }

  struct SpatialOut {
    nn::Var hg, r, c, hs;
  };

  /// h_g from the two Bi-GRUs (row fusion first, then column fusion over
  /// (h_b (+) h_t)), r_i / c_j from the shared pooling MLP, and
  /// h_s = h_g (+) r_i (+) c_j broadcast back to cells.
  SpatialOut spatial_encode(const nn::Var& x, int n_rows, int n_cols,
                            const nn::FwdCtx& ctx) const {
    using nn::Var;
    SpatialOut out;
    const auto pools = tabularnet::detail::make_pooling(n_rows, n_cols);
    std::vector<Var> hs_parts;
    if (cfg_.use_bigru) {
      auto row_out = row_gru_.run(x, tabularnet::detail::row_sequences(n_rows, n_cols));
      auto col_out = col_gru_.run(x, tabularnet::detail::col_sequences(n_rows, n_cols));
      Var row_in = nn::concat_cols({row_out.forward_states, row_out.backward_states});  // h_l (+) h_r
      Var col_in = nn::concat_cols({col_out.backward_states, col_out.forward_states});  // h_b (+) h_t
      Var row_fused = nn::relu(nn::add_rowvec(nn::matmul(row_in, fuse_row_w_), fuse_row_b_));
      Var col_fused = nn::relu(nn::add_rowvec(nn::matmul(col_in, fuse_col_w_), fuse_col_b_));
      out.hg = nn::concat_cols({row_fused, col_fused});
      hs_parts.push_back(out.hg);
    }
    Var pooled = pool_mlp_.forward(x, ctx);
    out.r = nn::matmul(pools.row_mean, pooled);
    out.c = nn::matmul(pools.col_mean, pooled);
    hs_parts.push_back(nn::matmul(pools.row_cast, out.r));
    hs_parts.push_back(nn::matmul(pools.col_cast, out.c));
    out.hs = nn::concat_cols(hs_parts);
    return out;
  }

  /// GIN stack: h(0) = MLP_e(x), then
  /// h(l+1) = MLP_o((1 + eps_l) h(l) + sum over in-neighbors of h(l)).
  nn::Var relational_encode(const nn::Var& x, const CellGraph& g, const nn::FwdCtx& ctx) const {
    nn::Var h = gin_lift_.forward(x, ctx);
    const auto adj = g.in_neighbors();
    for (size_t k = 0; k < gin_update_.size(); ++k) {
      nn::Var agg = nn::add(nn::add(h, nn::scalar_mul(h, gin_eps_[k])), nn::neighbor_sum(h, adj));
      h = gin_update_[k].forward(agg, ctx);
    }
    return h;
  }

  CellEmbeddings forward(const nn::Var& x, const CellGraph& g, int n_rows, int n_cols,
                         const nn::FwdCtx& ctx) const {
    CellEmbeddings e;
    auto spatial = spatial_encode(x, n_rows, n_cols, ctx);
    e.hg = spatial.hg;
    e.r = spatial.r;
    e.c = spatial.c;
    e.hs = spatial.hs;
    if (cfg_.use_gin) {
      e.hrel = relational_encode(x, g, ctx);
      e.h = nn::concat_cols({e.hs, e.hrel});
    } else {
      e.h = e.hs;
    }
    return e;
  }

  int input_dim() const { return input_dim_; }
  const nn::Var& gin_eps(size_t k) const { return gin_eps_[k]; }
  const nn::Mlp& gin_lift() const { return gin_lift_; }
  const nn::Mlp& gin_update(size_t k) const { return gin_update_[k]; }
  const nn::Mlp& pool_mlp() const { return pool_mlp_; }
  const nn::BiGru& row_gru() const { return row_gru_; }
  const nn::BiGru& col_gru() const { return col_gru_; }

 private:
  EncoderConfig cfg_;
  int input_dim_ = 0;
  nn::BiGru row_gru_, col_gru_;
  nn::Var fuse_row_w_, fuse_row_b_, fuse_col_w_, fuse_col_b_;
  nn::Mlp pool_mlp_;
  nn::Mlp gin_lift_;
  std::vector<nn::Var> gin_eps_;
  std::vector<nn::Mlp> gin_update_;
};

/// The full model: stacked structure layers plus task heads. Layer l+1
/// consumes layer l's h as its input features.
class TabularNetModel {
 public:
  TabularNetModel(EncoderConfig cfg, TaskKind task, std::uint64_t seed)
      : cfg_(cfg), task_(task) {
    cfg_.check();
    int in = cfg_.input_dim;
    for (int l = 0; l < cfg_.stack_layers; ++l) {
      layers_.emplace_back(store_, "layer" + std::to_string(l), cfg_, in,
                           seed + 10000 * static_cast<std::uint64_t>(l + 1));
      in = cfg_.cell_width();
    }
    using nn::Activation;
    const int w = cfg_.cell_width();
    if (task != TaskKind::Region)
      cell_head_ = nn::Mlp(store_, "head.cell", {w, cfg_.head_hidden, cfg_.head_hidden, kNumRoles},
                           Activation::Identity, seed + 777);
    if (task != TaskKind::Cell) {
      row_head_ = nn::Mlp(store_, "head.row", {w, cfg_.head_hidden, cfg_.head_hidden, 2},
                          Activation::Identity, seed + 888);
      col_head_ = nn::Mlp(store_, "head.col", {w, cfg_.head_hidden, cfg_.head_hidden, 2},
                          Activation::Identity, seed + 999);
    }
  }

  EncodedTable forward(const FeatureMatrix& x, const CellGraph& g, const nn::FwdCtx& ctx) const {
    if (x.dim != cfg_.input_dim)
      throw ModelError("encoder: feature width " + std::to_string(x.dim) +
                       " does not match configured input dim " + std::to_string(cfg_.input_dim));
    if (g.n_rows() != x.n_rows || g.n_cols() != x.n_cols)
      throw ModelError("encoder: graph shape does not match table '" + x.table_id + "'");
    nn::Tensor xt = nn::Tensor::from_rows(x.cell_count(), x.dim, x.data);
    return forward(nn::constant(std::move(xt)), g, x.n_rows, x.n_cols, ctx);
  }

  EncodedTable forward(const nn::Var& x0, const CellGraph& g, int n_rows, int n_cols,
                       const nn::FwdCtx& ctx) const {
    EncodedTable out;
    nn::Var x = x0;
    for (const StructureLayer& layer : layers_) {
      out.cells = layer.forward(x, g, n_rows, n_cols, ctx);
      x = out.cells.h;
    }
    const auto pools = detail::make_pooling(n_rows, n_cols);
    out.row_emb = nn::matmul(pools.row_mean, out.cells.h);
    out.col_emb = nn::matmul(pools.col_mean, out.cells.h);
    if (task_ != TaskKind::Region)
      out.cell_logp = nn::log_softmax_rows(cell_head_.forward(out.cells.h, ctx));
    if (task_ != TaskKind::Cell) {
      out.row_logp = nn::log_softmax_rows(row_head_.forward(out.row_emb, ctx));
      out.col_logp = nn::log_softmax_rows(col_head_.forward(out.col_emb, ctx));
    }
    return out;
  }

  const EncoderConfig& config() const { return cfg_; }
  TaskKind task() const { return task_; }
  nn::ParamStore& params() { return store_; }
  const nn::ParamStore& params() const { return store_; }
  StructureLayer& layer(size_t l = 0) { return layers_[l]; }
  const nn::Mlp& cell_head() const { return cell_head_; }

 private:
  EncoderConfig cfg_;
  TaskKind task_;
  nn::ParamStore store_;
  std::vector<StructureLayer> layers_;
  nn::Mlp cell_head_, row_head_, col_head_;
};

/// Mean pooling of final cell embeddings into row/column representations.
inline std::pair<nn::Var, nn::Var> integrate_rows_cols(const nn::Var& h, int n_rows, int n_cols) {
  const auto pools = detail::make_pooling(n_rows, n_cols);
  return {nn::matmul(pools.row_mean, h), nn::matmul(pools.col_mean, h)};
}

}  // namespace tabularnet
