#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tabularnet/cell_graph.hpp"
#include "tabularnet/checkpoint.hpp"
#include "tabularnet/encoder.hpp"
#include "tabularnet/features.hpp"
#include "tabularnet/metrics.hpp"
#include "tabularnet/nn/optimizer.hpp"
#include "tabularnet/table.hpp"
#include "tabularnet/taxonomy.hpp"
#include "tabularnet/text_embedding.hpp"

namespace tabularnet {

struct TrainConfig {
  TaskKind task = TaskKind::Cell;
  int batch_size = 10;  // tables per optimizer step
  int max_epochs = 50;
  int patience = 8;
  nn::AdamWConfig optimizer;
  EncoderConfig encoder;  // input_dim is filled from the feature schema
  GraphKind graph = GraphKind::Wordnet;
  WordnetGraphOptions graph_opts;
  std::uint64_t seed = 0;
  bool deterministic = false;  // accepted for interface parity; this
                               // implementation is single-threaded and
                               // deterministic either way
  bool class_weighting = false;  // inverse-frequency cell-loss weights

  void check() const {
    if (batch_size < 1) throw ModelError("train config: batch_size must be >= 1");
    if (max_epochs < 0) throw ModelError("train config: max_epochs must be >= 0");
    if (patience < 1) throw ModelError("train config: patience must be >= 1");
    if (max_epochs > 0 && patience > max_epochs)
      throw ModelError("train config: patience must not exceed max_epochs");
  }
};

/// A table with everything the model consumes precomputed: features, cell
/// graph, and flattened labels.
struct PreparedTable {
  std::string id;
  int n_rows = 0;
  int n_cols = 0;
  FeatureMatrix features;
  std::unique_ptr<CellGraph> graph;
  std::vector<int> cell_labels;  // cell-major CellRole values
  std::vector<int> row_labels;   // 1 = top-header row
  std::vector<int> col_labels;   // 1 = left-header column
};

inline PreparedTable prepare_table(const GridTable& t, const TextEmbeddingProvider& provider,
                                   GraphKind kind, const Taxonomy* tax, const Lexicon* lex,
                                   const WordnetGraphOptions& opts) {
  PreparedTable p;
  p.id = t.id;
  p.n_rows = t.n_rows;
  p.n_cols = t.n_cols;
  p.features = extract_features(t, provider);
  p.graph = std::make_unique<CellGraph>(build_graph(kind, t, tax, lex, opts));
  p.cell_labels.reserve(static_cast<size_t>(t.cell_count()));
  for (int r = 0; r < t.n_rows; ++r)
    for (int c = 0; c < t.n_cols; ++c)
      p.cell_labels.push_back(static_cast<int>(t.at(r, c).label));
  p.row_labels.assign(static_cast<size_t>(t.n_rows), 0);
  for (int r : t.header_rows) p.row_labels[static_cast<size_t>(r)] = 1;
  p.col_labels.assign(static_cast<size_t>(t.n_cols), 0);
  for (int c : t.header_cols) p.col_labels[static_cast<size_t>(c)] = 1;
  return p;
}

inline std::vector<PreparedTable> prepare_tables(const std::vector<GridTable>& tables,
                                                 const TextEmbeddingProvider& provider,
                                                 GraphKind kind, const Taxonomy* tax,
                                                 const Lexicon* lex,
                                                 const WordnetGraphOptions& opts) {
  std::vector<PreparedTable> out;
  out.reserve(tables.size());
  for (const GridTable& t : tables)
    out.push_back(prepare_table(t, provider, kind, tax, lex, opts));
  return out;
}

namespace detail {

inline std::vector<double> inverse_frequency_weights(const std::vector<PreparedTable>& tables) {
  std::vector<double> counts(kNumRoles, 0.0);
  for (const PreparedTable& t : tables)
    for (int y : t.cell_labels) counts[static_cast<size_t>(y)] += 1.0;
  double total = 0.0;
  for (double c : counts) total += c;
  std::vector<double> w(kNumRoles, 1.0);
  for (int k = 0; k < kNumRoles; ++k)
    w[static_cast<size_t>(k)] = counts[static_cast<size_t>(k)] > 0.0
                                    ? total / (kNumRoles * counts[static_cast<size_t>(k)])
                                    : 0.0;
  return w;
}

inline nn::Var table_loss(const TabularNetModel& model, const PreparedTable& t,
                          const nn::FwdCtx& ctx, const std::vector<double>* cell_weights) {
  const EncodedTable enc = model.forward(t.features, *t.graph, ctx);
  std::optional<nn::Var> loss;
  auto accumulate = [&loss](nn::Var part) {
    loss = loss ? nn::add(*loss, part) : part;
  };
  if (model.task() != TaskKind::Region) {
    accumulate(cell_weights ? nn::nll_class_weighted(enc.cell_logp, t.cell_labels, *cell_weights)
                            : nn::nll_mean(enc.cell_logp, t.cell_labels));
  }
  if (model.task() != TaskKind::Cell) {
    accumulate(nn::nll_mean(enc.row_logp, t.row_labels));
    accumulate(nn::nll_mean(enc.col_logp, t.col_labels));
  }
  return *loss;
}

inline int argmax_row(const nn::Tensor& m, int row) {
  int best = 0;
  for (int j = 1; j < m.cols(); ++j)
    if (m(row, j) > m(row, best)) best = j;  // ties keep the lowest index
  return best;
}

}  // namespace detail

/// Argmax predictions plus the final cell embeddings for one table.
struct TablePrediction {
  std::string id;
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> cell_roles;  // empty when the checkpoint has no cell head
  std::vector<int> header_rows;
  std::vector<int> header_cols;
  bool has_cell_head = false;
  bool has_region_head = false;
};

inline TablePrediction predict_table(const TabularNetModel& model, const PreparedTable& t) {
  const EncodedTable enc = model.forward(t.features, *t.graph, nn::FwdCtx{});
  TablePrediction p;
  p.id = t.id;
  p.n_rows = t.n_rows;
  p.n_cols = t.n_cols;
  p.has_cell_head = model.task() != TaskKind::Region;
  p.has_region_head = model.task() != TaskKind::Cell;
  if (p.has_cell_head) {
    for (int i = 0; i < t.n_rows * t.n_cols; ++i)
      p.cell_roles.push_back(detail::argmax_row(enc.cell_logp.val(), i));
  }
  if (p.has_region_head) {
    for (int r = 0; r < t.n_rows; ++r)
      if (detail::argmax_row(enc.row_logp.val(), r) == 1) p.header_rows.push_back(r);
    for (int c = 0; c < t.n_cols; ++c)
      if (detail::argmax_row(enc.col_logp.val(), c) == 1) p.header_cols.push_back(c);
  }
  return p;
}

/// Deterministic dropout-free evaluation; never touches model weights.
inline MetricsReport evaluate_prepared(const TabularNetModel& model,
                                       const std::vector<PreparedTable>& tables) {
  MetricsReport report;
  report.task = task_name(model.task());
  report.has_cell = model.task() != TaskKind::Region;
  report.has_region = model.task() != TaskKind::Cell;
  for (const PreparedTable& t : tables) {
    const TablePrediction p = predict_table(model, t);
    if (report.has_cell)
      for (size_t i = 0; i < t.cell_labels.size(); ++i)
        report.cell.confusion.add(t.cell_labels[i], p.cell_roles[i]);
    if (report.has_region) {
      std::vector<int> pred_rows(static_cast<size_t>(t.n_rows), 0);
      for (int r : p.header_rows) pred_rows[static_cast<size_t>(r)] = 1;
      std::vector<int> pred_cols(static_cast<size_t>(t.n_cols), 0);
      for (int c : p.header_cols) pred_cols[static_cast<size_t>(c)] = 1;
      for (size_t r = 0; r < t.row_labels.size(); ++r)
        report.region.row_confusion.add(t.row_labels[r], pred_rows[r]);
      for (size_t c = 0; c < t.col_labels.size(); ++c)
        report.region.col_confusion.add(t.col_labels[c], pred_cols[c]);
    }
  }
  if (report.has_cell) report.cell.finalize();
  if (report.has_region) report.region.finalize();
  return report;
}

struct TrainResult {
  std::unique_ptr<TabularNetModel> model;
  CheckpointMeta meta;
  MetricsReport report;  // best-checkpoint validation metrics + history
};

/// Seeded epochs over shuffled tables, gradients accumulated per batch and
/// averaged before each AdamW step. Validation macro-F1 (task-dependent)
/// drives early stopping; the best checkpoint is restored at the end.
inline TrainResult train(const TrainConfig& cfg, const std::vector<PreparedTable>& train_tables,
                         const std::vector<PreparedTable>& val_tables,
                         const TextEmbeddingProvider& provider) {
  cfg.check();
  if (train_tables.empty()) throw ModelError("train: empty training set");

  TrainResult result;
  EncoderConfig enc_cfg = cfg.encoder;
  enc_cfg.input_dim = kHandcraftedWidth + provider.dim();
  result.model = std::make_unique<TabularNetModel>(enc_cfg, cfg.task, cfg.seed);
  result.meta.schema_fingerprint = FeatureSchema::with_embedding(provider.dim()).fingerprint();
  result.meta.embedding_kind = provider.kind();
  result.meta.embedding_dim = provider.dim();
  result.meta.graph_kind = cfg.graph;
  result.meta.graph_opts = cfg.graph_opts;
  result.meta.task = cfg.task;
  result.meta.encoder = enc_cfg;
  result.report.task = task_name(cfg.task);

  for (const PreparedTable& t : train_tables)
    if (t.features.schema_fingerprint != result.meta.schema_fingerprint)
      throw ModelError("train: feature fingerprint mismatch for table '" + t.id + "'");

  std::optional<std::vector<double>> cell_weights;
  if (cfg.class_weighting && cfg.task != TaskKind::Region)
    cell_weights = detail::inverse_frequency_weights(train_tables);

  const bool with_val = !val_tables.empty();
  if (!with_val) warn("train: validation set empty; early stopping disabled");

  TabularNetModel& model = *result.model;
  nn::AdamW opt(cfg.optimizer);
  Rng rng(cfg.seed);

  std::vector<size_t> order(train_tables.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  double best_score = -1.0;
  int best_epoch = 0;
  int epochs_since_best = 0;
  std::vector<nn::Tensor> best_params;

  auto snapshot = [&model]() {
    std::vector<nn::Tensor> snap;
    for (const nn::Parameter& p : model.params().all()) snap.push_back(p.var.val());
    return snap;
  };

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    size_t n_batches = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      model.params().zero_grad();
      double batch_loss = 0.0;
      for (size_t k = start; k < end; ++k) {
        const PreparedTable& t = train_tables[order[k]];
        nn::FwdCtx ctx{true, enc_cfg.dropout, &rng};
        nn::Var loss = detail::table_loss(model, t, ctx,
                                          cell_weights ? &*cell_weights : nullptr);
        const double lv = loss.val()[0];
        if (!std::isfinite(lv))
          throw ModelError("train: non-finite loss at epoch " + std::to_string(epoch) +
                           ", table '" + t.id + "' (divergence)");
        batch_loss += lv;
        nn::backward(loss);
      }
      model.params().scale_grads(1.0 / static_cast<double>(end - start));
      opt.step(model.params());
      epoch_loss += batch_loss / static_cast<double>(end - start);
      ++n_batches;
    }

    EpochStat stat;
    stat.epoch = epoch;
    stat.train_loss = epoch_loss / static_cast<double>(n_batches);
    if (with_val) {
      const MetricsReport val_report = evaluate_prepared(model, val_tables);
      stat.val_score = val_report.headline_score();
      stat.has_val = true;
    }
    result.report.history.push_back(stat);

    if (with_val) {
      if (stat.val_score > best_score) {
        best_score = stat.val_score;
        best_epoch = epoch;
        best_params = snapshot();
        epochs_since_best = 0;
      } else if (++epochs_since_best >= cfg.patience) {
        break;
      }
    }
  }

  if (with_val && !best_params.empty()) {
    auto& params = model.params().all();
    for (size_t i = 0; i < params.size(); ++i) params[i].var.node->value = best_params[i];
    result.report.best_epoch = best_epoch;
    result.report.best_val_score = best_score;
  } else if (!result.report.history.empty()) {
    result.report.best_epoch = result.report.history.back().epoch;
  }

  // Final metrics of the restored checkpoint.
  if (with_val) {
    const MetricsReport final_val = evaluate_prepared(model, val_tables);
    result.report.has_cell = final_val.has_cell;
    result.report.has_region = final_val.has_region;
    result.report.cell = final_val.cell;
    result.report.region = final_val.region;
  }
  return result;
}

/// Verifies the checkpoint fingerprint against the features produced by
/// `provider` before any forward pass.
inline void check_fingerprint(const CheckpointMeta& meta, const TextEmbeddingProvider& provider) {
  const std::string current = FeatureSchema::with_embedding(provider.dim()).fingerprint();
  if (current != meta.schema_fingerprint)
    throw ModelError("feature schema fingerprint mismatch: checkpoint has " +
                     meta.schema_fingerprint + ", current schema is " + current +
                     " (embedding dim " + std::to_string(provider.dim()) + ")");
}

/// One tab-separated record per cell: table id, row, col, gold label,
/// predicted label, then the final cell embedding h.
inline std::string export_embeddings(const TabularNetModel& model,
                                     const std::vector<PreparedTable>& tables) {
  std::string out;
  char buf[64];
  for (const PreparedTable& t : tables) {
    const EncodedTable enc = model.forward(t.features, *t.graph, nn::FwdCtx{});
    const nn::Tensor& h = enc.cells.h.val();
    const bool has_cell = model.task() != TaskKind::Region;
    for (int r = 0; r < t.n_rows; ++r)
      for (int c = 0; c < t.n_cols; ++c) {
        const int i = r * t.n_cols + c;
        out += t.id;
        out += '\t';
        out += std::to_string(r);
        out += '\t';
        out += std::to_string(c);
        out += '\t';
        out += role_name(static_cast<CellRole>(t.cell_labels[static_cast<size_t>(i)]));
        out += '\t';
        out += has_cell ? role_name(static_cast<CellRole>(detail::argmax_row(enc.cell_logp.val(), i)))
                        : "-";
        for (int j = 0; j < h.cols(); ++j) {
          std::snprintf(buf, sizeof(buf), "%.17g", h(i, j));
          out += '\t';
          out += buf;
        }
        out += '\n';
      }
  }
  return out;
}

/// JSON export of one feature matrix, fingerprint included.
inline std::string export_feature_matrix(const FeatureMatrix& m) {
  nlohmann::json j;
  j["table_id"] = m.table_id;
  j["n_rows"] = m.n_rows;
  j["n_cols"] = m.n_cols;
  j["dim"] = m.dim;
  j["schema_fingerprint"] = m.schema_fingerprint;
  nlohmann::json cells = nlohmann::json::array();
  for (int i = 0; i < m.cell_count(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    const double* v = m.data.data() + static_cast<size_t>(i) * m.dim;
    for (int d = 0; d < m.dim; ++d) row.push_back(v[d]);
    cells.push_back(std::move(row));
  }
  j["cells"] = std::move(cells);
  return j.dump();
}

inline nlohmann::json prediction_to_json(const TablePrediction& p) {
  nlohmann::json j;
  j["table_id"] = p.id;
  j["n_rows"] = p.n_rows;
  j["n_cols"] = p.n_cols;
  if (p.has_cell_head) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < p.n_rows; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < p.n_cols; ++c)
        row.push_back(role_name(static_cast<CellRole>(p.cell_roles[static_cast<size_t>(r * p.n_cols + c)])));
      rows.push_back(std::move(row));
    }
    j["cell_roles"] = std::move(rows);
  }
  if (p.has_region_head) {
    j["header_rows"] = p.header_rows;
    j["header_cols"] = p.header_cols;
  }
  return j;
}

}  // namespace tabularnet
