#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tabularnet/common.hpp"
#include "tabularnet/table.hpp"

namespace tabularnet {

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long support = 0;     // gold occurrences
  bool absent = false;  // seen in neither gold nor predictions
};

/// Gold-major confusion counts: at(gold, pred).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int n_classes = kNumRoles)
      : n_(n_classes), counts_(static_cast<size_t>(n_classes) * n_classes, 0) {}

  void add(int gold, int pred, long count = 1) {
    if (gold < 0 || gold >= n_ || pred < 0 || pred >= n_)
      throw ModelError("confusion: class out of range");
    counts_[static_cast<size_t>(gold) * n_ + pred] += count;
  }

  long at(int gold, int pred) const { return counts_[static_cast<size_t>(gold) * n_ + pred]; }
  int classes() const { return n_; }

  void merge(const ConfusionMatrix& other) {
    if (other.n_ != n_) throw ModelError("confusion: merge size mismatch");
    for (size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  }

  /// Precision/recall/F1 with the 0-when-undefined convention; a class seen
  /// in neither gold nor predictions is flagged absent (F1 = 0).
  ClassScore score(int cls) const {
    long tp = at(cls, cls), fp = 0, fn = 0;
    for (int k = 0; k < n_; ++k) {
      if (k == cls) continue;
      fp += at(k, cls);
      fn += at(cls, k);
    }
    ClassScore s;
    s.support = tp + fn;
    s.absent = (tp + fp + fn) == 0;
    s.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    s.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (int g = 0; g < n_; ++g) {
      nlohmann::json row = nlohmann::json::array();
      for (int p = 0; p < n_; ++p) row.push_back(at(g, p));
      rows.push_back(std::move(row));
    }
    return rows;
  }

 private:
  int n_;
  std::vector<long> counts_;
};

struct CellMetrics {
  ConfusionMatrix confusion{kNumRoles};
  std::vector<ClassScore> per_class;  // indexed by CellRole
  double macro_f1_4 = 0.0;            // over the four non-Other roles
  double macro_f1_5 = 0.0;

  void finalize() {
    per_class.clear();
    double sum4 = 0.0, sum5 = 0.0;
    for (int k = 0; k < kNumRoles; ++k) {
      per_class.push_back(confusion.score(k));
      sum5 += per_class.back().f1;
      if (k != static_cast<int>(CellRole::Other)) sum4 += per_class.back().f1;
    }
    macro_f1_4 = sum4 / (kNumRoles - 1);
    macro_f1_5 = sum5 / kNumRoles;
  }
};

struct RegionMetrics {
  ConfusionMatrix row_confusion{2};  // class 1 = header
  ConfusionMatrix col_confusion{2};
  ClassScore top_header;
  ClassScore left_header;
  double mean_f1 = 0.0;

  void finalize() {
    top_header = row_confusion.score(1);
    left_header = col_confusion.score(1);
    mean_f1 = 0.5 * (top_header.f1 + left_header.f1);
  }
};

struct EpochStat {
  int epoch = 0;
  double train_loss = 0.0;
  double val_score = 0.0;
  bool has_val = false;
};

struct MetricsReport {
  std::string task;
  bool has_cell = false;
  bool has_region = false;
  CellMetrics cell;
  RegionMetrics region;
  std::vector<EpochStat> history;
  int best_epoch = 0;
  double best_val_score = 0.0;

  double headline_score() const {
    if (has_cell && has_region) return 0.5 * (cell.macro_f1_4 + region.mean_f1);
    if (has_cell) return cell.macro_f1_4;
    return region.mean_f1;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["task"] = task;
    if (has_cell) {
      nlohmann::json c;
      nlohmann::json per;
      for (int k = 0; k < kNumRoles; ++k) {
        const ClassScore& s = cell.per_class[static_cast<size_t>(k)];
        per[role_name(static_cast<CellRole>(k))] = {{"precision", s.precision},
                                                    {"recall", s.recall},
                                                    {"f1", s.f1},
                                                    {"support", s.support},
                                                    {"absent", s.absent}};
      }
      c["per_class"] = std::move(per);
      c["macro_f1_4"] = cell.macro_f1_4;
      c["macro_f1_5"] = cell.macro_f1_5;
      c["confusion"] = cell.confusion.to_json();
      j["cell"] = std::move(c);
    }
    if (has_region) {
      auto score_json = [](const ClassScore& s) {
        return nlohmann::json{{"precision", s.precision},
                              {"recall", s.recall},
                              {"f1", s.f1},
                              {"support", s.support},
                              {"absent", s.absent}};
      };
      j["region"] = {{"top_header", score_json(region.top_header)},
                     {"left_header", score_json(region.left_header)},
                     {"mean_f1", region.mean_f1},
                     {"row_confusion", region.row_confusion.to_json()},
                     {"col_confusion", region.col_confusion.to_json()}};
    }
    if (!history.empty()) {
      nlohmann::json h = nlohmann::json::array();
      for (const EpochStat& e : history) {
        nlohmann::json ej{{"epoch", e.epoch}, {"train_loss", e.train_loss}};
        if (e.has_val) ej["val_score"] = e.val_score;
        h.push_back(std::move(ej));
      }
      j["history"] = std::move(h);
      j["best_epoch"] = best_epoch;
      j["best_val_score"] = best_val_score;
    }
    return j;
  }

  std::string dump() const { return to_json().dump(2); }
};

}  // namespace tabularnet
