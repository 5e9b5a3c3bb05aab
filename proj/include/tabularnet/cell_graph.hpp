#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tabularnet/common.hpp"
#include "tabularnet/table.hpp"
#include "tabularnet/taxonomy.hpp"

namespace tabularnet {

using CellCoord = std::pair<int, int>;

/// Edge set over grid coordinates. Undirected graphs store each edge once,
/// endpoints in canonical (lexicographic) order; directed graphs keep the
/// stored orientation. Message passing reads `in_neighbors`: both endpoints
/// see each other on undirected graphs, only the edge target sees the
/// source on directed ones.
class CellGraph {
 public:
  CellGraph(std::string table_id, int n_rows, int n_cols, bool directed)
      : table_id_(std::move(table_id)), n_rows_(n_rows), n_cols_(n_cols), directed_(directed) {}

  void add_edge(CellCoord a, CellCoord b) {
    check(a);
    check(b);
    if (a == b) throw ValidationError("cell graph: self-loop at (" + coord_str(a) + ")");
    if (!directed_ && b < a) std::swap(a, b);
    edges_.insert({a, b});
  }

  bool has_edge(CellCoord a, CellCoord b) const {
    if (!directed_ && b < a) std::swap(a, b);
    return edges_.count({a, b}) > 0;
  }

  const std::set<std::pair<CellCoord, CellCoord>>& edges() const { return edges_; }
  size_t edge_count() const { return edges_.size(); }
  bool directed() const { return directed_; }
  const std::string& table_id() const { return table_id_; }
  int n_rows() const { return n_rows_; }
  int n_cols() const { return n_cols_; }

  /// Cell-major adjacency: entry k lists the flat indices feeding cell k.
  std::vector<std::vector<int>> in_neighbors() const {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n_rows_) * n_cols_);
    for (const auto& [a, b] : edges_) {
      adj[flat(b)].push_back(static_cast<int>(flat(a)));
      if (!directed_) adj[flat(a)].push_back(static_cast<int>(flat(b)));
    }
    for (auto& v : adj) std::sort(v.begin(), v.end());
    return adj;
  }

 private:
  size_t flat(CellCoord c) const { return static_cast<size_t>(c.first) * n_cols_ + c.second; }

  static std::string coord_str(CellCoord c) {
    return std::to_string(c.first) + "," + std::to_string(c.second);
  }

  void check(CellCoord c) const {
    if (c.first < 0 || c.first >= n_rows_ || c.second < 0 || c.second >= n_cols_)
      throw ValidationError("cell graph: endpoint (" + coord_str(c) + ") outside " +
                            std::to_string(n_rows_) + "x" + std::to_string(n_cols_) + " grid");
  }

  std::string table_id_;
  int n_rows_;
  int n_cols_;
  bool directed_;
  std::set<std::pair<CellCoord, CellCoord>> edges_;
};

struct WordnetGraphOptions {
  int eta = 3;
  int eps_depth = 2;
  bool strict_gap = false;  // compare the depth gap with < instead of <=
};

/// Connects cells whose word sets contain taxonomy nodes at equal depth
/// with a lowest common ancestor at most eps_depth layers above them.
/// Replicas of one merged cell act as a single node; edges found between
/// origins are then expanded to every replica position.
inline CellGraph build_wordnet_graph(const GridTable& t, const Taxonomy& tax, const Lexicon& lex,
                                     const WordnetGraphOptions& opt = {}) {
  if (opt.eps_depth < 0) throw ValidationError("wordnet graph: eps_depth must be >= 0");
  CellGraph g(t.id, t.n_rows, t.n_cols, /*directed=*/false);

  // One node per origin cell.
  std::map<CellCoord, std::vector<CellCoord>> positions;
  for (int r = 0; r < t.n_rows; ++r)
    for (int c = 0; c < t.n_cols; ++c) positions[t.at(r, c).origin].push_back({r, c});

  std::vector<CellCoord> origins;
  std::vector<std::vector<int>> sets;
  origins.reserve(positions.size());
  for (const auto& [origin, _] : positions) {
    origins.push_back(origin);
    sets.push_back(word_set(t.at(origin.first, origin.second).text, lex, opt.eta));
  }

  auto related = [&](const std::vector<int>& ws_x, const std::vector<int>& ws_y) {
    for (int i : ws_x)
      for (int j : ws_y) {
        if (tax.depth(i) != tax.depth(j)) continue;
        const int gap = tax.depth(i) - tax.depth(tax.lca(i, j));
        if (opt.strict_gap ? gap < opt.eps_depth : gap <= opt.eps_depth) return true;
      }
    return false;
  };

  for (size_t x = 0; x < origins.size(); ++x)
    for (size_t y = x + 1; y < origins.size(); ++y) {
      if (sets[x].empty() || sets[y].empty()) continue;
      if (!related(sets[x], sets[y])) continue;
      for (const CellCoord& px : positions[origins[x]])
        for (const CellCoord& py : positions[origins[y]]) g.add_edge(px, py);
    }
  return g;
}

/// Undirected edges between orthogonally adjacent grid positions.
inline CellGraph build_grid_graph(const GridTable& t) {
  CellGraph g(t.id, t.n_rows, t.n_cols, /*directed=*/false);
  for (int r = 0; r < t.n_rows; ++r)
    for (int c = 0; c < t.n_cols; ++c) {
      if (r + 1 < t.n_rows) g.add_edge({r, c}, {r + 1, c});
      if (c + 1 < t.n_cols) g.add_edge({r, c}, {r, c + 1});
    }
  return g;
}

/// Directed subset of the grid edges: downward and rightward only.
inline CellGraph build_tlbr_graph(const GridTable& t) {
  CellGraph g(t.id, t.n_rows, t.n_cols, /*directed=*/true);
  for (int r = 0; r < t.n_rows; ++r)
    for (int c = 0; c < t.n_cols; ++c) {
      if (r + 1 < t.n_rows) g.add_edge({r, c}, {r + 1, c});
      if (c + 1 < t.n_cols) g.add_edge({r, c}, {r, c + 1});
    }
  return g;
}

/// Graph with no edges; GIN over it degenerates to a per-cell MLP stack.
inline CellGraph build_empty_graph(const GridTable& t) {
  return CellGraph(t.id, t.n_rows, t.n_cols, /*directed=*/false);
}

enum class GraphKind { Wordnet, Grid, Tlbr, None };

inline const char* graph_kind_name(GraphKind k) {
  switch (k) {
    case GraphKind::Wordnet: return "wordnet";
    case GraphKind::Grid: return "grid";
    case GraphKind::Tlbr: return "tlbr";
    case GraphKind::None: return "none";
  }
  return "none";
}

inline std::optional<GraphKind> graph_kind_from_name(std::string_view s) {
  if (s == "wordnet") return GraphKind::Wordnet;
  if (s == "grid") return GraphKind::Grid;
  if (s == "tlbr") return GraphKind::Tlbr;
  if (s == "none") return GraphKind::None;
  return std::nullopt;
}

inline CellGraph build_graph(GraphKind kind, const GridTable& t, const Taxonomy* tax,
                             const Lexicon* lex, const WordnetGraphOptions& opt = {}) {
  switch (kind) {
    case GraphKind::Wordnet:
      if (!tax || !lex)
        throw ValidationError("wordnet graph requires a taxonomy and a lexicon");
      return build_wordnet_graph(t, *tax, *lex, opt);
    case GraphKind::Grid: return build_grid_graph(t);
    case GraphKind::Tlbr: return build_tlbr_graph(t);
    case GraphKind::None: return build_empty_graph(t);
  }
  return build_empty_graph(t);
}

/// Text export: a '#' header naming the construction, then one edge per
/// line as `r1,c1<TAB>r2,c2`.
inline std::string export_graph(const CellGraph& g, const std::string& construction,
                                const std::string& params = "") {
  std::ostringstream os;
  os << "# construction=" << construction << " table=" << g.table_id()
     << " rows=" << g.n_rows() << " cols=" << g.n_cols()
     << " directed=" << (g.directed() ? 1 : 0);
  if (!params.empty()) os << " " << params;
  os << "\n";
  for (const auto& [a, b] : g.edges())
    os << a.first << "," << a.second << "\t" << b.first << "," << b.second << "\n";
  return os.str();
}

}  // namespace tabularnet
