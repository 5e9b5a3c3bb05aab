#pragma once

#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tabularnet/common.hpp"

namespace tabularnet {

/// Maps cell text to a fixed-width embedding. Empty text always embeds to
/// the zero vector.
class TextEmbeddingProvider {
 public:
  virtual ~TextEmbeddingProvider() = default;
  virtual int dim() const = 0;
  virtual std::vector<double> embed(const std::string& text) const = 0;
  virtual std::string kind() const = 0;
};

/// Deterministic stand-in for a pretrained text model: feature-hashes
/// character trigrams of the lowercased text into `dim` buckets, then
/// L2-normalizes. Language-free and stable across runs.
class HashingEmbeddingProvider final : public TextEmbeddingProvider {
 public:
  explicit HashingEmbeddingProvider(int dim = 64) : dim_(dim) {
    if (dim < 1) throw ModelError("embedding dim must be positive");
  }

  int dim() const override { return dim_; }
  std::string kind() const override { return "hash"; }

  std::vector<double> embed(const std::string& text) const override {
    std::vector<double> v(static_cast<size_t>(dim_), 0.0);
    std::string s;
    s.reserve(text.size() + 2);
    s.push_back('^');  // boundary markers
    for (unsigned char ch : text) {
      if (ch < 0x20 || ch == 0x7f) continue;  // strip control characters
      s.push_back(ch < 0x80 ? static_cast<char>(std::tolower(ch)) : static_cast<char>(ch));
    }
    if (s.size() == 1) return v;  // text empty after stripping
    s.push_back('$');
    for (size_t i = 0; i + 3 <= s.size(); ++i) {
      const std::uint64_t h = fnv1a64(std::string_view(s).substr(i, 3));
      v[h % static_cast<std::uint64_t>(dim_)] += 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
    }
    return v;
  }

 private:
  int dim_;
};

/// Exact-text lookup in a precomputed embedding file. File layout:
/// a `#dim D` header line, then `text<TAB>v1,v2,...,vD` lines.
/// Missing texts embed to zero with a one-time warning per text.
class FileEmbeddingProvider final : public TextEmbeddingProvider {
 public:
  static FileEmbeddingProvider from_stream(std::istream& in, const std::string& origin) {
    FileEmbeddingProvider p;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line[0] == '#') {
        std::istringstream hs(line.substr(1));
        std::string key;
        hs >> key;
        if (key == "dim") {
          if (!(hs >> p.dim_) || p.dim_ < 1)
            throw ParseError(origin + ": bad #dim header on line " + std::to_string(lineno));
        }
        continue;
      }
      if (p.dim_ <= 0)
        throw ParseError(origin + ": embedding data before #dim header (line " +
                         std::to_string(lineno) + ")");
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw ParseError(origin + ": line " + std::to_string(lineno) + " missing tab separator");
      std::vector<double> v;
      v.reserve(static_cast<size_t>(p.dim_));
      std::stringstream vs(line.substr(tab + 1));
      std::string num;
      while (std::getline(vs, num, ',')) {
        try {
          v.push_back(std::stod(num));
        } catch (const std::exception&) {
          throw ParseError(origin + ": line " + std::to_string(lineno) + " has a bad number '" +
                           num + "'");
        }
      }
      if (static_cast<int>(v.size()) != p.dim_)
        throw ParseError(origin + ": line " + std::to_string(lineno) + " has " +
                         std::to_string(v.size()) + " values, expected " + std::to_string(p.dim_));
      p.table_[line.substr(0, tab)] = std::move(v);
    }
    if (p.dim_ <= 0) throw ParseError(origin + ": missing #dim header");
    return p;
  }

  static FileEmbeddingProvider from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open embedding file: " + path);
    return from_stream(in, path);
  }

  int dim() const override { return dim_; }
  std::string kind() const override { return "file"; }

  std::vector<double> embed(const std::string& text) const override {
    if (text.empty()) return std::vector<double>(static_cast<size_t>(dim_), 0.0);
    auto it = table_.find(text);
    if (it != table_.end()) return it->second;
    if (warned_.insert(text).second)
      warn("embedding file has no entry for '" + text + "'; using zero vector");
    return std::vector<double>(static_cast<size_t>(dim_), 0.0);
  }

 private:
  int dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> table_;
  mutable std::set<std::string> warned_;
};

inline std::unique_ptr<TextEmbeddingProvider> make_embedding_provider(
    const std::string& embeddings_file, int default_dim = 64) {
  if (embeddings_file.empty()) return std::make_unique<HashingEmbeddingProvider>(default_dim);
  return std::make_unique<FileEmbeddingProvider>(FileEmbeddingProvider::from_file(embeddings_file));
}

}  // namespace tabularnet
