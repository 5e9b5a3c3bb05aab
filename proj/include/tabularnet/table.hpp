#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tabularnet/common.hpp"

namespace tabularnet {

/// Semantic role of a single cell.
enum class CellRole { IndexName = 0, Index = 1, ValueName = 2, Aggregation = 3, Other = 4 };

inline constexpr int kNumRoles = 5;

inline const char* role_name(CellRole r) {
  switch (r) {
    case CellRole::IndexName: return "index_name";
    case CellRole::Index: return "index";
    case CellRole::ValueName: return "value_name";
    case CellRole::Aggregation: return "aggregation";
    case CellRole::Other: return "other";
  }
  return "other";
}

inline std::optional<CellRole> role_from_name(std::string_view s) {
  if (s == "index_name") return CellRole::IndexName;
  if (s == "index") return CellRole::Index;
  if (s == "value_name") return CellRole::ValueName;
  if (s == "aggregation") return CellRole::Aggregation;
  if (s == "other") return CellRole::Other;
  return std::nullopt;
}

/// Number/date/percentage/currency/text/other display class of a cell.
enum class FormatClass { Number = 0, Datetime = 1, Percentage = 2, Currency = 3, Text = 4, Other = 5 };

inline constexpr int kNumFormatClasses = 6;

inline const char* format_class_name(FormatClass f) {
  switch (f) {
    case FormatClass::Number: return "number";
    case FormatClass::Datetime: return "datetime";
    case FormatClass::Percentage: return "percentage";
    case FormatClass::Currency: return "currency";
    case FormatClass::Text: return "text";
    case FormatClass::Other: return "other";
  }
  return "other";
}

inline std::optional<FormatClass> format_class_from_name(std::string_view s) {
  if (s == "number") return FormatClass::Number;
  if (s == "datetime") return FormatClass::Datetime;
  if (s == "percentage") return FormatClass::Percentage;
  if (s == "currency") return FormatClass::Currency;
  if (s == "text") return FormatClass::Text;
  if (s == "other") return FormatClass::Other;
  return std::nullopt;
}

/// ARGB color, channels in [0,255], alpha first.
using Color = std::array<int, 4>;

/// Style attributes of one cell. Defaults describe an implicit empty cell:
/// white fill, transparent-black font, no borders, zero metrics, class Other.
struct CellStyle {
  Color fill_color{255, 255, 255, 255};
  Color font_color{0, 0, 0, 0};
  // Border order is top, bottom, left, right throughout.
  std::array<Color, 4> border_color{Color{0, 0, 0, 0}, Color{0, 0, 0, 0}, Color{0, 0, 0, 0},
                                    Color{0, 0, 0, 0}};
  std::array<bool, 4> border_present{false, false, false, false};
  bool font_bold = false;
  bool font_underline = false;
  bool has_formula = false;
  double font_size = 0.0;
  double height = 0.0;
  double width = 0.0;
  int indent_level = 0;
  FormatClass format_class = FormatClass::Other;

  bool operator==(const CellStyle&) const = default;
};

/// A cell as declared in a table file; may span several grid positions.
struct RawCell {
  int row = 0;
  int col = 0;
  int row_span = 1;
  int col_span = 1;
  std::string text;
  CellStyle style;
  std::optional<CellRole> label;
};

/// A table as parsed from disk, before merged-cell normalization.
struct RawTable {
  std::string id;
  int n_rows = 0;
  int n_cols = 0;
  std::vector<RawCell> cells;
  std::vector<int> header_rows;
  std::vector<int> header_cols;
};

/// One position of the dense grid. `origin` points at the top-left corner
/// of the merged cell this position was replicated from.
struct GridCell {
  std::string text;
  CellStyle style;
  CellRole label = CellRole::Other;
  std::pair<int, int> origin{0, 0};
};

/// Dense normalized table: every (row, col) position is populated.
struct GridTable {
  std::string id;
  int n_rows = 0;
  int n_cols = 0;
  std::vector<GridCell> grid;  // row-major, n_rows * n_cols
  std::vector<int> header_rows;
  std::vector<int> header_cols;

  const GridCell& at(int r, int c) const { return grid[static_cast<size_t>(r) * n_cols + c]; }
  GridCell& at(int r, int c) { return grid[static_cast<size_t>(r) * n_cols + c]; }
  int cell_count() const { return n_rows * n_cols; }
};

inline constexpr int kDefaultMaxCells = 5000;

/// Checks every RawTable invariant: positive dims, spans inside the grid,
/// pairwise-disjoint footprints, header indices in range. Large tables are
/// rejected unless `allow_large` is set.
inline void validate(const RawTable& t, bool allow_large = false) {
  if (t.n_rows <= 0 || t.n_cols <= 0)
    throw ValidationError("table '" + t.id + "': n_rows and n_cols must be positive");
  if (!allow_large && static_cast<long long>(t.n_rows) * t.n_cols > kDefaultMaxCells)
    throw ValidationError("table '" + t.id + "': " + std::to_string(t.n_rows * t.n_cols) +
                          " cells exceeds the " + std::to_string(kDefaultMaxCells) +
                          "-cell limit (pass allow_large to override)");
  std::vector<int> owner(static_cast<size_t>(t.n_rows) * t.n_cols, -1);
  for (size_t k = 0; k < t.cells.size(); ++k) {
    const RawCell& c = t.cells[k];
    if (c.row_span < 1 || c.col_span < 1)
      throw ValidationError("table '" + t.id + "': cell (" + std::to_string(c.row) + "," +
                            std::to_string(c.col) + ") has non-positive span");
    if (c.row < 0 || c.col < 0 || c.row + c.row_span > t.n_rows || c.col + c.col_span > t.n_cols)
      throw ValidationError("table '" + t.id + "': cell (" + std::to_string(c.row) + "," +
                            std::to_string(c.col) + ") footprint leaves the grid");
    for (int r = c.row; r < c.row + c.row_span; ++r)
      for (int j = c.col; j < c.col + c.col_span; ++j) {
        int& slot = owner[static_cast<size_t>(r) * t.n_cols + j];
        if (slot >= 0) {
          const RawCell& prev = t.cells[slot];
          throw ValidationError("table '" + t.id + "': cell (" + std::to_string(c.row) + "," +
                                std::to_string(c.col) + ") overlaps cell (" +
                                std::to_string(prev.row) + "," + std::to_string(prev.col) +
                                ") at position (" + std::to_string(r) + "," + std::to_string(j) +
                                ")");
        }
        slot = static_cast<int>(k);
      }
    for (const auto& ch : c.style.fill_color)
      if (ch < 0 || ch > 255)
        throw ValidationError("table '" + t.id + "': color channel out of [0,255]");
  }
  for (int r : t.header_rows)
    if (r < 0 || r >= t.n_rows)
      throw ValidationError("table '" + t.id + "': header row " + std::to_string(r) +
                            " out of range");
  for (int c : t.header_cols)
    if (c < 0 || c >= t.n_cols)
      throw ValidationError("table '" + t.id + "': header col " + std::to_string(c) +
                            " out of range");
}

/// Splits merged cells into individual grid positions carrying the same
/// text, style and label. Positions covered by no declared cell become
/// empty-text cells with the default style and label Other.
inline GridTable normalize(const RawTable& t, bool allow_large = false) {
  validate(t, allow_large);
  GridTable g;
  g.id = t.id;
  g.n_rows = t.n_rows;
  g.n_cols = t.n_cols;
  g.header_rows = t.header_rows;
  g.header_cols = t.header_cols;
  g.grid.resize(static_cast<size_t>(t.n_rows) * t.n_cols);
  for (int r = 0; r < t.n_rows; ++r)
    for (int c = 0; c < t.n_cols; ++c) g.at(r, c).origin = {r, c};
  for (const RawCell& c : t.cells) {
    GridCell cell;
    cell.text = c.text;
    cell.style = c.style;
    cell.label = c.label.value_or(CellRole::Other);
    cell.origin = {c.row, c.col};
    for (int r = c.row; r < c.row + c.row_span; ++r)
      for (int j = c.col; j < c.col + c.col_span; ++j) g.at(r, j) = cell;
  }
  return g;
}

/// Inverse of normalize for an already-dense grid: every position becomes
/// a 1x1 RawCell. Re-normalizing the result reproduces the grid.
inline RawTable to_raw(const GridTable& g) {
  RawTable t;
  t.id = g.id;
  t.n_rows = g.n_rows;
  t.n_cols = g.n_cols;
  t.header_rows = g.header_rows;
  t.header_cols = g.header_cols;
  t.cells.reserve(g.grid.size());
  for (int r = 0; r < g.n_rows; ++r)
    for (int c = 0; c < g.n_cols; ++c) {
      const GridCell& gc = g.at(r, c);
      RawCell rc;
      rc.row = r;
      rc.col = c;
      rc.text = gc.text;
      rc.style = gc.style;
      rc.label = gc.label;
      t.cells.push_back(std::move(rc));
    }
  return t;
}

inline bool grid_equal(const GridTable& a, const GridTable& b) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols) return false;
  for (size_t i = 0; i < a.grid.size(); ++i) {
    const GridCell& x = a.grid[i];
    const GridCell& y = b.grid[i];
    if (x.text != y.text || !(x.style == y.style) || x.label != y.label) return false;
  }
  return true;
}

}  // namespace tabularnet
