#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tabularnet/common.hpp"
#include "tabularnet/table.hpp"
#include "tabularnet/text_embedding.hpp"

namespace tabularnet {

/// Divisor applied to font_size, height and width before they enter the
/// feature vector; keeps typical spreadsheet values O(1).
inline constexpr double kMetricRescale = 100.0;

inline constexpr int kTextFeatureWidth = 5;
inline constexpr int kStyleFeatureWidth = 41;
inline constexpr int kCoordinateWidth = 4;
inline constexpr int kDecayedWidth = 2;
inline constexpr int kHandcraftedWidth =
    kTextFeatureWidth + kStyleFeatureWidth + kCoordinateWidth + kDecayedWidth;  // 52

/// Ordered feature layout. The handcrafted slots are fixed; only the
/// trailing embedding width varies with the provider.
struct FeatureSchema {
  struct Entry {
    std::string name;
    int width;
  };
  std::vector<Entry> entries;
  int embedding_dim;

  static FeatureSchema with_embedding(int embedding_dim) {
    FeatureSchema s;
    s.embedding_dim = embedding_dim;
    s.entries = {
        {"text", kTextFeatureWidth},
        {"text_format_onehot", kNumFormatClasses},
        {"fill_color", 4},
        {"border_present", 4},
        {"border_colors", 16},
        {"font_color", 4},
        {"font_bold", 1},
        {"font_size", 1},
        {"font_underline", 1},
        {"height_width", 2},
        {"has_formula", 1},
        {"indent_level", 1},
        {"coordinates", kCoordinateWidth},
        {"decayed_position", kDecayedWidth},
        {"text_embedding", embedding_dim},
    };
    return s;
  }

  int total_width() const {
    int w = 0;
    for (const auto& e : entries) w += e.width;
    return w;
  }

  /// Stable hash of the layout; embedded in exports and checked at load.
  std::string fingerprint() const {
    std::string desc;
    for (const auto& e : entries) desc += e.name + ":" + std::to_string(e.width) + "|";
    return to_hex(fnv1a64(desc));
  }
};

/// [length in characters, is_empty, digit_ratio, contains '%', contains '.'].
/// Length counts UTF-8 code points, not bytes.
inline std::vector<double> text_features(const std::string& text) {
  int chars = 0;
  int digits = 0;
  bool percent = false;
  bool dot = false;
  for (unsigned char ch : text) {
    if ((ch & 0xc0) == 0x80) continue;  // UTF-8 continuation byte
    ++chars;
    if (ch >= '0' && ch <= '9') ++digits;
    if (ch == '%') percent = true;
    if (ch == '.') dot = true;
  }
  const double ratio = chars == 0 ? 0.0 : static_cast<double>(digits) / chars;
  return {static_cast<double>(chars), chars == 0 ? 1.0 : 0.0, ratio, percent ? 1.0 : 0.0,
          dot ? 1.0 : 0.0};
}

namespace detail {
inline void push_color(std::vector<double>& out, const Color& c) {
  for (int ch : c) out.push_back(ch / 255.0);
}
}  // namespace detail

/// 41 style slots: format one-hot, colors rescaled to [0,1], booleans as
/// {0,1}, metrics divided by kMetricRescale, indent as float.
inline std::vector<double> style_features(const CellStyle& s) {
  std::vector<double> out;
  out.reserve(kStyleFeatureWidth);
  for (int i = 0; i < kNumFormatClasses; ++i)
    out.push_back(i == static_cast<int>(s.format_class) ? 1.0 : 0.0);
  detail::push_color(out, s.fill_color);
  for (bool b : s.border_present) out.push_back(b ? 1.0 : 0.0);
  for (const Color& bc : s.border_color) detail::push_color(out, bc);
  detail::push_color(out, s.font_color);
  out.push_back(s.font_bold ? 1.0 : 0.0);
  out.push_back(s.font_size / kMetricRescale);
  out.push_back(s.font_underline ? 1.0 : 0.0);
  out.push_back(s.height / kMetricRescale);
  out.push_back(s.width / kMetricRescale);
  out.push_back(s.has_formula ? 1.0 : 0.0);
  out.push_back(static_cast<double>(s.indent_level));
  return out;
}

/// Four-dimensional position against the top-left and bottom-right anchors.
inline std::vector<double> coordinates(int r, int c, int n_rows, int n_cols) {
  if (r < 0 || c < 0 || r >= n_rows || c >= n_cols)
    throw ValidationError("coordinates: (" + std::to_string(r) + "," + std::to_string(c) +
                          ") outside " + std::to_string(n_rows) + "x" + std::to_string(n_cols));
  return {static_cast<double>(r), static_cast<double>(c), static_cast<double>(n_rows - 1 - r),
          static_cast<double>(n_cols - 1 - c)};
}

/// [e^-row, e^-col]: suppresses positional identity deep in the data
/// region while keeping it sharp near the header.
inline std::vector<double> decayed_position(int r, int c) {
  return {std::exp(-static_cast<double>(r)), std::exp(-static_cast<double>(c))};
}

/// Per-cell feature vectors laid out row-major as n_rows * n_cols rows of
/// `dim` doubles.
struct FeatureMatrix {
  std::string table_id;
  int n_rows = 0;
  int n_cols = 0;
  int dim = 0;
  std::vector<double> data;
  std::string schema_fingerprint;

  const double* cell(int r, int c) const {
    return data.data() + (static_cast<size_t>(r) * n_cols + c) * dim;
  }
  int cell_count() const { return n_rows * n_cols; }
};

/// Concatenates [text | style | coordinates | decayed | embedding] per cell
/// in schema order.
inline FeatureMatrix extract_features(const GridTable& t, const TextEmbeddingProvider& provider) {
  const FeatureSchema schema = FeatureSchema::with_embedding(provider.dim());
  FeatureMatrix m;
  m.table_id = t.id;
  m.n_rows = t.n_rows;
  m.n_cols = t.n_cols;
  m.dim = schema.total_width();
  m.schema_fingerprint = schema.fingerprint();
  m.data.reserve(static_cast<size_t>(m.cell_count()) * m.dim);
  for (int r = 0; r < t.n_rows; ++r)
    for (int c = 0; c < t.n_cols; ++c) {
      const GridCell& cell = t.at(r, c);
      auto append = [&m](const std::vector<double>& v) {
        m.data.insert(m.data.end(), v.begin(), v.end());
      };
      append(text_features(cell.text));
      append(style_features(cell.style));
      append(coordinates(r, c, t.n_rows, t.n_cols));
      append(decayed_position(r, c));
      append(provider.embed(cell.text));
    }
  for (double v : m.data)
    if (!std::isfinite(v))
      throw ModelError("feature extraction produced a non-finite value in table '" + t.id + "'");
  return m;
}

}  // namespace tabularnet
