#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tabularnet/common.hpp"

namespace tabularnet {

namespace detail {
inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}
}  // namespace detail

/// Rooted word tree with depth and lowest-common-ancestor queries.
/// Node ids are interned strings; the root is the unique node that never
/// appears as a child in the input.
class Taxonomy {
 public:
  /// Parses lines of `child<TAB>parent`. '#' starts a comment. Rejects
  /// multi-parent nodes, cycles, and forests with several roots.
  static Taxonomy from_stream(std::istream& in) {
    Taxonomy t;
    std::unordered_map<std::string, std::string> parent_of;
    std::vector<std::string> order;  // first-mention order, keeps ids stable
    std::unordered_set<std::string> mentioned;
    auto mention = [&](const std::string& name) {
      if (mentioned.insert(name).second) order.push_back(name);
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw ParseError("taxonomy line " + std::to_string(lineno) + ": expected child<TAB>parent");
      const std::string child = detail::trim(line.substr(0, tab));
      const std::string parent = detail::trim(line.substr(tab + 1));
      if (child.empty() || parent.empty())
        throw ParseError("taxonomy line " + std::to_string(lineno) + ": empty node name");
      if (child == parent)
        throw ParseError("taxonomy line " + std::to_string(lineno) + ": node '" + child +
                         "' cannot be its own parent");
      auto [it, inserted] = parent_of.emplace(child, parent);
      if (!inserted && it->second != parent)
        throw ValidationError("taxonomy: node '" + child +
                              "' has multiple parents ('" + it->second + "' and '" + parent +
                              "'); the tree loader requires single-parent input");
      mention(child);
      mention(parent);
    }
    if (order.empty()) throw ValidationError("taxonomy: no edges found");

    std::vector<std::string> roots;
    for (const auto& name : order)
      if (!parent_of.count(name)) roots.push_back(name);
    if (roots.empty())
      throw ValidationError("taxonomy: cycle detected (every node has a parent)");
    if (roots.size() > 1) {
      std::string msg = "taxonomy: multiple roots:";
      for (const auto& r : roots) msg += " '" + r + "'";
      throw ValidationError(msg);
    }

    for (const auto& name : order) {
      t.index_.emplace(name, static_cast<int>(t.names_.size()));
      t.names_.push_back(name);
    }
    t.parent_.assign(t.names_.size(), -1);
    for (const auto& [child, parent] : parent_of)
      t.parent_[t.index_.at(child)] = t.index_.at(parent);
    t.root_ = t.index_.at(roots[0]);

    // Depth assignment doubles as cycle detection: a walk longer than the
    // node count means a loop that never reaches the root.
    t.depth_.assign(t.names_.size(), -1);
    t.depth_[static_cast<size_t>(t.root_)] = 0;
    for (size_t i = 0; i < t.names_.size(); ++i) {
      std::vector<int> chain;
      int cur = static_cast<int>(i);
      while (t.depth_[static_cast<size_t>(cur)] < 0) {
        chain.push_back(cur);
        cur = t.parent_[static_cast<size_t>(cur)];
        if (chain.size() > t.names_.size())
          throw ValidationError("taxonomy: cycle detected near node '" + t.names_[i] + "'");
      }
      int d = t.depth_[static_cast<size_t>(cur)];
      for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        t.depth_[static_cast<size_t>(*it)] = ++d;
    }
    return t;
  }

  static Taxonomy from_string(const std::string& text) {
    std::istringstream in(text);
    return from_stream(in);
  }

  int size() const { return static_cast<int>(names_.size()); }
  int root() const { return root_; }
  const std::string& name(int node) const { return names_[static_cast<size_t>(node)]; }

  int find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

  int require(const std::string& name) const {
    int n = find(name);
    if (n < 0) throw ValidationError("taxonomy: unknown node '" + name + "'");
    return n;
  }

  int depth(int node) const { return depth_[check(node)]; }
  int parent(int node) const { return parent_[check(node)]; }

  /// Deepest node that is an ancestor-or-self of both arguments.
  int lca(int a, int b) const {
    check(a);
    check(b);
    while (depth_[static_cast<size_t>(a)] > depth_[static_cast<size_t>(b)])
      a = parent_[static_cast<size_t>(a)];
    while (depth_[static_cast<size_t>(b)] > depth_[static_cast<size_t>(a)])
      b = parent_[static_cast<size_t>(b)];
    while (a != b) {
      a = parent_[static_cast<size_t>(a)];
      b = parent_[static_cast<size_t>(b)];
    }
    return a;
  }

  int max_depth() const {
    int m = 0;
    for (int d : depth_) m = std::max(m, d);
    return m;
  }

 private:
  size_t check(int node) const {
    if (node < 0 || node >= size()) throw ValidationError("taxonomy: node id out of range");
    return static_cast<size_t>(node);
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> parent_;
  std::vector<int> depth_;
  int root_ = -1;
};

/// Surface word -> ordered synset node list.
class Lexicon {
 public:
  /// Parses lines of `word<TAB>node1,node2,...` (synset order preserved).
  static Lexicon from_stream(std::istream& in, const Taxonomy& tax) {
    Lexicon lex;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw ParseError("lexicon line " + std::to_string(lineno) + ": expected word<TAB>nodes");
      const std::string word = detail::trim(line.substr(0, tab));
      std::vector<int> nodes;
      std::stringstream nodes_ss(line.substr(tab + 1));
      std::string node_name;
      while (std::getline(nodes_ss, node_name, ',')) {
        node_name = detail::trim(node_name);
        if (node_name.empty()) continue;
        nodes.push_back(tax.require(node_name));
      }
      if (word.empty() || nodes.empty())
        throw ParseError("lexicon line " + std::to_string(lineno) + ": empty word or synset");
      lex.synsets_[word] = std::move(nodes);
    }
    return lex;
  }

  static Lexicon from_string(const std::string& text, const Taxonomy& tax) {
    std::istringstream in(text);
    return from_stream(in, tax);
  }

  const std::vector<int>* lookup(const std::string& word) const {
    auto it = synsets_.find(word);
    return it == synsets_.end() ? nullptr : &it->second;
  }

  void add(const std::string& word, std::vector<int> nodes) { synsets_[word] = std::move(nodes); }

  size_t size() const { return synsets_.size(); }

 private:
  std::unordered_map<std::string, std::vector<int>> synsets_;
};

/// Lowercases and splits on whitespace and ASCII punctuation. Bytes outside
/// ASCII are kept as token characters.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char ch : text) {
    const bool sep = ch < 0x80 && (std::isspace(ch) || std::ispunct(ch));
    if (sep) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch < 0x80 ? static_cast<char>(std::tolower(ch)) : static_cast<char>(ch));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

/// Word set of a cell: for each token found in the lexicon, the first
/// min(eta, |synset|) nodes in synset order. Duplicates are retained.
inline std::vector<int> word_set(const std::string& cell_text, const Lexicon& lex, int eta) {
  if (eta < 1) throw ValidationError("word_set: eta must be >= 1");
  std::vector<int> nodes;
  for (const std::string& tok : tokenize(cell_text)) {
    const std::vector<int>* syn = lex.lookup(tok);
    if (!syn) continue;
    const size_t take = std::min<size_t>(static_cast<size_t>(eta), syn->size());
    nodes.insert(nodes.end(), syn->begin(), syn->begin() + static_cast<long>(take));
  }
  return nodes;
}

}  // namespace tabularnet
