#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabularnet/common.hpp"
#include "tabularnet/table.hpp"

namespace tabularnet {

namespace detail {

inline Color color_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4)
    throw ValidationError(where + ": color must be a 4-integer [A,R,G,B] array");
  Color c{};
  for (int i = 0; i < 4; ++i) {
    if (!j[i].is_number_integer()) throw ValidationError(where + ": color channel must be an integer");
    c[i] = j[i].get<int>();
    if (c[i] < 0 || c[i] > 255) throw ValidationError(where + ": color channel out of [0,255]");
  }
  return c;
}

inline nlohmann::json color_to_json(const Color& c) { return nlohmann::json{c[0], c[1], c[2], c[3]}; }

inline const char* kBorderNames[4] = {"top", "bottom", "left", "right"};

inline CellStyle style_from_json(const nlohmann::json& j, const std::string& where) {
  CellStyle s;
  if (j.contains("fill_color")) s.fill_color = color_from_json(j.at("fill_color"), where);
  if (j.contains("font_color")) s.font_color = color_from_json(j.at("font_color"), where);
  if (j.contains("border_color")) {
    const auto& bc = j.at("border_color");
    for (int i = 0; i < 4; ++i)
      if (bc.contains(kBorderNames[i])) s.border_color[i] = color_from_json(bc.at(kBorderNames[i]), where);
  }
  if (j.contains("border_present")) {
    const auto& bp = j.at("border_present");
    for (int i = 0; i < 4; ++i)
      if (bp.contains(kBorderNames[i])) s.border_present[i] = bp.at(kBorderNames[i]).get<bool>();
  }
  if (j.contains("font_bold")) s.font_bold = j.at("font_bold").get<bool>();
  if (j.contains("font_underline")) s.font_underline = j.at("font_underline").get<bool>();
  if (j.contains("has_formula")) s.has_formula = j.at("has_formula").get<bool>();
  if (j.contains("font_size")) s.font_size = j.at("font_size").get<double>();
  if (j.contains("height")) s.height = j.at("height").get<double>();
  if (j.contains("width")) s.width = j.at("width").get<double>();
  if (j.contains("indent_level")) s.indent_level = j.at("indent_level").get<int>();
  if (s.font_size < 0 || s.height < 0 || s.width < 0 || s.indent_level < 0)
    throw ValidationError(where + ": size/height/width/indent must be non-negative");
  if (j.contains("format_class")) {
    auto f = format_class_from_name(j.at("format_class").get<std::string>());
    if (!f) throw ValidationError(where + ": unknown format_class '" +
                                  j.at("format_class").get<std::string>() + "'");
    s.format_class = *f;
  }
  return s;
}

inline nlohmann::json style_to_json(const CellStyle& s) {
  nlohmann::json j;
  j["fill_color"] = color_to_json(s.fill_color);
  j["font_color"] = color_to_json(s.font_color);
  nlohmann::json bc, bp;
  for (int i = 0; i < 4; ++i) {
    bc[kBorderNames[i]] = color_to_json(s.border_color[i]);
    bp[kBorderNames[i]] = s.border_present[i];
  }
  j["border_color"] = bc;
  j["border_present"] = bp;
  j["font_bold"] = s.font_bold;
  j["font_underline"] = s.font_underline;
  j["has_formula"] = s.has_formula;
  j["font_size"] = s.font_size;
  j["height"] = s.height;
  j["width"] = s.width;
  j["indent_level"] = s.indent_level;
  j["format_class"] = format_class_name(s.format_class);
  return j;
}

}  // namespace detail

/// Decodes one table document. Malformed syntax reports the byte offset;
/// invariant violations name the offending cell.
inline RawTable parse_table(const std::string& bytes, bool allow_large = false) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("table parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  RawTable t;
  try {
    t.id = j.at("id").get<std::string>();
    t.n_rows = j.at("n_rows").get<int>();
    t.n_cols = j.at("n_cols").get<int>();
    if (j.contains("header_rows")) t.header_rows = j.at("header_rows").get<std::vector<int>>();
    if (j.contains("header_cols")) t.header_cols = j.at("header_cols").get<std::vector<int>>();
    for (const auto& cj : j.at("cells")) {
      RawCell c;
      c.row = cj.at("row").get<int>();
      c.col = cj.at("col").get<int>();
      if (cj.contains("row_span")) c.row_span = cj.at("row_span").get<int>();
      if (cj.contains("col_span")) c.col_span = cj.at("col_span").get<int>();
      if (cj.contains("text")) c.text = cj.at("text").get<std::string>();
      const std::string where =
          "table '" + t.id + "' cell (" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
      if (cj.contains("style")) c.style = detail::style_from_json(cj.at("style"), where);
      if (cj.contains("label") && !cj.at("label").is_null()) {
        auto role = role_from_name(cj.at("label").get<std::string>());
        if (!role)
          throw ValidationError(where + ": unknown label '" + cj.at("label").get<std::string>() + "'");
        c.label = role;
      }
      t.cells.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("table document missing or mistyped field: ") + e.what());
  }
  validate(t, allow_large);
  return t;
}

inline std::string serialize_table(const RawTable& t) {
  nlohmann::json j;
  j["id"] = t.id;
  j["n_rows"] = t.n_rows;
  j["n_cols"] = t.n_cols;
  j["header_rows"] = t.header_rows;
  j["header_cols"] = t.header_cols;
  nlohmann::json cells = nlohmann::json::array();
  for (const RawCell& c : t.cells) {
    nlohmann::json cj;
    cj["row"] = c.row;
    cj["col"] = c.col;
    cj["row_span"] = c.row_span;
    cj["col_span"] = c.col_span;
    cj["text"] = c.text;
    cj["style"] = detail::style_to_json(c.style);
    if (c.label) cj["label"] = role_name(*c.label);
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  return j.dump(2);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + p.string());
  out << bytes;
}

inline constexpr const char* kManifestName = "manifest.txt";

/// Loads a dataset: a directory with table files and a manifest listing
/// them one file name per line ('#' starts a comment).
inline std::vector<GridTable> load_dataset(const std::filesystem::path& dir, bool allow_large = false) {
  const auto manifest = dir / kManifestName;
  std::ifstream in(manifest);
  if (!in) throw ParseError("cannot open manifest: " + manifest.string());
  std::vector<GridTable> tables;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    RawTable raw = parse_table(read_file(dir / line), allow_large);
    tables.push_back(normalize(raw, allow_large));
  }
  return tables;
}

inline void save_dataset(const std::filesystem::path& dir, const std::vector<RawTable>& tables) {
  std::filesystem::create_directories(dir);
  std::ostringstream manifest;
  for (const RawTable& t : tables) {
    const std::string name = t.id + ".table.json";
    write_file(dir / name, serialize_table(t));
    manifest << name << "\n";
  }
  write_file(dir / kManifestName, manifest.str());
}

}  // namespace tabularnet
