#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "tabularnet/dataset_io.hpp"
#include "tabularnet/rng.hpp"
#include "tabularnet/table.hpp"
#include "tabularnet/taxonomy.hpp"

namespace tabularnet {

/// Small taxonomy shipped for tests and synthetic data. Index-name words
/// sit at depth 3 with their index values as depth-4 children, so peer
/// cells (two countries, two years) link in the wordnet graph while
/// unrelated pairs stay apart.
inline const char* demo_taxonomy_text() {
  return
      "abstraction\tentity\n"
      "physical_entity\tentity\n"
      "measure\tabstraction\n"
      "time_period\tabstraction\n"
      "location\tphysical_entity\n"
      "artifact\tphysical_entity\n"
      "amount\tmeasure\n"
      "count\tmeasure\n"
      "percent\tmeasure\n"
      "price\tmeasure\n"
      "revenue\tmeasure\n"
      "profit\tmeasure\n"
      "average\tmeasure\n"
      "total\tmeasure\n"
      "year\ttime_period\n"
      "quarter\ttime_period\n"
      "month\ttime_period\n"
      "country\tlocation\n"
      "city\tlocation\n"
      "product\tartifact\n"
      "vehicle\tartifact\n"
      "china\tcountry\n"
      "france\tcountry\n"
      "brazil\tcountry\n"
      "canada\tcountry\n"
      "egypt\tcountry\n"
      "japan\tcountry\n"
      "paris\tcity\n"
      "tokyo\tcity\n"
      "cairo\tcity\n"
      "sydney\tcity\n"
      "oslo\tcity\n"
      "lima\tcity\n"
      "laptop\tproduct\n"
      "phone\tproduct\n"
      "tablet\tproduct\n"
      "camera\tproduct\n"
      "monitor\tproduct\n"
      "printer\tproduct\n"
      "truck\tvehicle\n"
      "sedan\tvehicle\n"
      "coupe\tvehicle\n"
      "wagon\tvehicle\n"
      "van\tvehicle\n"
      "bus\tvehicle\n"
      "y2016\tyear\n"
      "y2017\tyear\n"
      "y2018\tyear\n"
      "y2019\tyear\n"
      "y2020\tyear\n"
      "y2021\tyear\n"
      "q1\tquarter\n"
      "q2\tquarter\n"
      "q3\tquarter\n"
      "q4\tquarter\n"
      "jan\tmonth\n"
      "feb\tmonth\n"
      "mar\tmonth\n"
      "apr\tmonth\n"
      "may\tmonth\n"
      "jun\tmonth\n";
}

inline const char* demo_lexicon_text() {
  return
      "amount\tamount\n"
      "count\tcount\n"
      "percent\tpercent\n"
      "price\tprice\n"
      "revenue\trevenue\n"
      "profit\tprofit,revenue\n"
      "average\taverage\n"
      "total\ttotal\n"
      "year\tyear\n"
      "quarter\tquarter\n"
      "month\tmonth\n"
      "country\tcountry\n"
      "city\tcity\n"
      "product\tproduct\n"
      "vehicle\tvehicle\n"
      "china\tchina\n"
      "france\tfrance\n"
      "brazil\tbrazil\n"
      "canada\tcanada\n"
      "egypt\tegypt\n"
      "japan\tjapan\n"
      "paris\tparis\n"
      "tokyo\ttokyo\n"
      "cairo\tcairo\n"
      "sydney\tsydney\n"
      "oslo\toslo\n"
      "lima\tlima\n"
      "laptop\tlaptop\n"
      "phone\tphone\n"
      "tablet\ttablet\n"
      "camera\tcamera\n"
      "monitor\tmonitor\n"
      "printer\tprinter\n"
      "truck\ttruck\n"
      "sedan\tsedan\n"
      "coupe\tcoupe\n"
      "wagon\twagon\n"
      "van\tvan\n"
      "bus\tbus\n"
      "2016\ty2016\n"
      "2017\ty2017\n"
      "2018\ty2018\n"
      "2019\ty2019\n"
      "2020\ty2020\n"
      "2021\ty2021\n"
      "q1\tq1\n"
      "q2\tq2\n"
      "q3\tq3\n"
      "q4\tq4\n"
      "jan\tjan\n"
      "feb\tfeb\n"
      "mar\tmar\n"
      "apr\tapr\n"
      "may\tmay\n"
      "jun\tjun\n"
      "january\tjan\n"
      "february\tfeb\n"
      "march\tmar\n"
      "april\tapr\n"
      "june\tjun\n";
}

inline Taxonomy demo_taxonomy() { return Taxonomy::from_string(demo_taxonomy_text()); }
inline Lexicon demo_lexicon(const Taxonomy& tax) {
  return Lexicon::from_string(demo_lexicon_text(), tax);
}

/// Knobs of the generator. Row/col ranges size the data region; header
/// depth ranges add on top. style_noise is the probability that any one
/// style cue (bold, fill, borders) flips on a cell.
struct SyntheticSpec {
  int table_count = 300;
  int min_data_rows = 3;
  int max_data_rows = 6;
  int min_data_cols = 2;
  int max_data_cols = 5;
  int min_header_rows = 1;
  int max_header_rows = 3;
  int min_header_cols = 0;
  int max_header_cols = 2;
  double aggregation_prob = 0.5;
  double style_noise = 0.1;
  /// Probability of a single-row header that interleaves value names with
  /// month indexes; those cells are separable mainly through their words.
  double mixed_header_prob = 0.2;
  /// Probability that an aggregation row's name cell is blank: the row is
  /// then recognizable only through its formula-bearing neighbors.
  double blank_total_prob = 0.25;
  std::uint64_t seed = 0;
};

namespace detail {

struct Vocab {
  std::string topic;
  std::vector<std::string> values;
};

inline const std::vector<Vocab>& row_vocabs() {
  static const std::vector<Vocab> v = {
      {"country", {"china", "france", "brazil", "canada", "egypt", "japan"}},
      {"city", {"paris", "tokyo", "cairo", "sydney", "oslo", "lima"}},
      {"product", {"laptop", "phone", "tablet", "camera", "monitor", "printer"}},
      {"vehicle", {"truck", "sedan", "coupe", "wagon", "van", "bus"}},
  };
  return v;
}

inline const std::vector<Vocab>& col_vocabs() {
  static const std::vector<Vocab> v = {
      {"year", {"2016", "2017", "2018", "2019", "2020", "2021"}},
      {"quarter", {"q1", "q2", "q3", "q4"}},
      {"month", {"jan", "feb", "mar", "apr", "may", "jun"}},
  };
  return v;
}

inline const std::vector<std::string>& measure_words() {
  static const std::vector<std::string> v = {"amount", "count",  "percent", "price",
                                             "revenue", "profit", "average"};
  return v;
}

/// Letter-only index words whose lengths overlap the measure words, so the
/// mixed header row cannot be separated on surface statistics alone.
inline const std::vector<std::string>& long_month_words() {
  static const std::vector<std::string> v = {"january", "february", "march", "april", "june"};
  return v;
}

inline CellStyle header_style(Rng& rng, double noise) {
  CellStyle s;
  s.fill_color = {255, 221, 235, 247};
  s.font_color = {255, 0, 0, 0};
  s.font_bold = true;
  s.font_size = 12.0;
  s.height = 20.0;
  s.width = 64.0;
  s.format_class = FormatClass::Text;
  for (int i = 0; i < 4; ++i) {
    s.border_present[i] = true;
    s.border_color[i] = {255, 128, 128, 128};
  }
  if (rng.bernoulli(noise)) s.font_bold = false;
  if (rng.bernoulli(noise)) s.fill_color = {255, 255, 255, 255};
  if (rng.bernoulli(noise))
    for (int i = 0; i < 4; ++i) s.border_present[i] = false;
  return s;
}

inline CellStyle data_style(Rng& rng, double noise, FormatClass fc) {
  CellStyle s;
  s.fill_color = {255, 255, 255, 255};
  s.font_color = {255, 0, 0, 0};
  s.font_size = 10.0;
  s.height = 20.0;
  s.width = 64.0;
  s.format_class = fc;
  if (rng.bernoulli(noise)) s.font_bold = true;
  if (rng.bernoulli(noise)) s.fill_color = {255, 221, 235, 247};
  if (rng.bernoulli(noise)) {
    for (int i = 0; i < 4; ++i) {
      s.border_present[i] = true;
      s.border_color[i] = {255, 128, 128, 128};
    }
  }
  return s;
}

inline std::string numeric_text(Rng& rng, FormatClass fc) {
  switch (fc) {
    case FormatClass::Percentage:
      return std::to_string(rng.uniform_int(0, 99)) + "." + std::to_string(rng.uniform_int(0, 9)) +
             "%";
    case FormatClass::Currency:
      return std::to_string(rng.uniform_int(1, 9999)) + "." +
             std::to_string(rng.uniform_int(10, 99));
    default:
      return std::to_string(rng.uniform_int(1, 99999));
  }
}

inline FormatClass measure_format(const std::string& measure) {
  if (measure == "percent") return FormatClass::Percentage;
  if (measure == "price" || measure == "revenue" || measure == "profit")
    return FormatClass::Currency;
  return FormatClass::Number;
}

}  // namespace detail

/// Generates one labeled table in the cross-table idiom: 1-3 top header
/// rows (value names over an optional index row), 0-2 left index columns
/// with index-name corner cells spanning the top rows, numeric data cells,
/// and an optional trailing aggregation row anchored by a "total" cell.
inline RawTable generate_table(const SyntheticSpec& spec, std::uint64_t table_seed,
                               const std::string& id) {
  Rng rng(table_seed);
  RawTable t;
  t.id = id;

  const bool mixed_header = rng.bernoulli(spec.mixed_header_prob);
  const int top = mixed_header ? 1 : rng.uniform_int(spec.min_header_rows, spec.max_header_rows);
  int left = rng.uniform_int(spec.min_header_cols, spec.max_header_cols);
  const int data_rows = rng.uniform_int(spec.min_data_rows, spec.max_data_rows);
  const int data_cols = rng.uniform_int(spec.min_data_cols, spec.max_data_cols);
  const bool with_agg = left >= 1 && rng.bernoulli(spec.aggregation_prob);

  t.n_rows = top + data_rows + (with_agg ? 1 : 0);
  t.n_cols = left + data_cols;
  for (int r = 0; r < top; ++r) t.header_rows.push_back(r);
  for (int c = 0; c < left; ++c) t.header_cols.push_back(c);

  const auto& rvocabs = detail::row_vocabs();
  const auto& cvocabs = detail::col_vocabs();
  std::vector<int> rv_pick{rng.uniform_int(0, static_cast<int>(rvocabs.size()) - 1), 0};
  rv_pick[1] = (rv_pick[0] + 1 + rng.uniform_int(0, static_cast<int>(rvocabs.size()) - 2)) %
               static_cast<int>(rvocabs.size());
  const detail::Vocab& cvocab = cvocabs[static_cast<size_t>(
      rng.uniform_int(0, static_cast<int>(cvocabs.size()) - 1))];

  std::vector<std::string> measures = detail::measure_words();
  rng.shuffle(measures);

  auto add_cell = [&t](int r, int c, int rs, int cs, std::string text, CellStyle style,
                       CellRole role) {
    RawCell cell;
    cell.row = r;
    cell.col = c;
    cell.row_span = rs;
    cell.col_span = cs;
    cell.text = std::move(text);
    cell.style = std::move(style);
    cell.label = role;
    t.cells.push_back(std::move(cell));
  };

  // Corner: one index-name cell per left column, spanning all top rows.
  for (int c = 0; c < left; ++c)
    add_cell(0, c, top, 1, rvocabs[static_cast<size_t>(rv_pick[static_cast<size_t>(c)])].topic,
             detail::header_style(rng, spec.style_noise), CellRole::IndexName);

  // Top header. The deepest top row holds column indexes when top >= 2;
  // rows above hold (possibly merged) value names.
  std::vector<std::string> col_measure(static_cast<size_t>(data_cols));
  if (mixed_header) {
    // One header row mixing value names with month indexes, in two
    // contiguous blocks whose order varies per table. Role runs stay
    // adjacency-coherent while position alone cannot separate them.
    const auto& months = detail::long_month_words();
    const int n_index = data_cols < 2 ? 1 : rng.uniform_int(1, data_cols - 1);
    const bool index_first = rng.bernoulli(0.5);
    for (int j = 0; j < data_cols; ++j) {
      const bool index_col = index_first ? j < n_index : j >= data_cols - n_index;
      if (index_col) {
        col_measure[static_cast<size_t>(j)] = "count";
        add_cell(0, left + j, 1, 1,
                 months[static_cast<size_t>(rng.uniform_int(0, static_cast<int>(months.size()) - 1))],
                 detail::header_style(rng, spec.style_noise), CellRole::Index);
      } else {
        col_measure[static_cast<size_t>(j)] = measures[static_cast<size_t>(j) % measures.size()];
        add_cell(0, left + j, 1, 1, col_measure[static_cast<size_t>(j)],
                 detail::header_style(rng, spec.style_noise), CellRole::ValueName);
      }
    }
  } else if (top == 1) {
    for (int j = 0; j < data_cols; ++j) {
      col_measure[static_cast<size_t>(j)] = measures[static_cast<size_t>(j) % measures.size()];
      add_cell(0, left + j, 1, 1, col_measure[static_cast<size_t>(j)],
               detail::header_style(rng, spec.style_noise), CellRole::ValueName);
    }
  } else {
    // Index row directly above the data.
    for (int j = 0; j < data_cols; ++j) {
      std::string v = cvocab.values[static_cast<size_t>(j) % cvocab.values.size()];
      CellStyle st = detail::header_style(rng, spec.style_noise);
      st.format_class = cvocab.topic == "year" ? FormatClass::Number : FormatClass::Text;
      add_cell(top - 1, left + j, 1, 1, std::move(v), st, CellRole::Index);
    }
    const std::string& whole = measures[0];
    if (top == 2) {
      add_cell(0, left, 1, data_cols, whole, detail::header_style(rng, spec.style_noise),
               CellRole::ValueName);
      for (int j = 0; j < data_cols; ++j) col_measure[static_cast<size_t>(j)] = whole;
    } else {
      add_cell(0, left, 1, data_cols, whole, detail::header_style(rng, spec.style_noise),
               CellRole::ValueName);
      // Row 1: value-name groups of up to two columns.
      int j = 0, g = 1;
      while (j < data_cols) {
        const int span = std::min(2, data_cols - j);
        const std::string& m = measures[static_cast<size_t>(g) % measures.size()];
        add_cell(1, left + j, 1, span, m, detail::header_style(rng, spec.style_noise),
                 CellRole::ValueName);
        for (int k = 0; k < span; ++k) col_measure[static_cast<size_t>(j + k)] = m;
        j += span;
        ++g;
      }
    }
  }

  // Left index columns.
  const int first_data_row = top;
  for (int c = 0; c < left; ++c) {
    const detail::Vocab& vocab = rvocabs[static_cast<size_t>(rv_pick[static_cast<size_t>(c)])];
    for (int i = 0; i < data_rows; ++i) {
      CellStyle st = detail::header_style(rng, spec.style_noise);
      st.format_class = FormatClass::Text;
      st.indent_level = c;  // second-level indexes sit indented
      add_cell(first_data_row + i, c, 1, 1,
               vocab.values[static_cast<size_t>((i + c) % vocab.values.size())], st,
               CellRole::Index);
    }
  }

  // Data region.
  for (int i = 0; i < data_rows; ++i)
    for (int j = 0; j < data_cols; ++j) {
      const FormatClass fc =
          top == 2 || top == 3 || top == 1
              ? detail::measure_format(col_measure[static_cast<size_t>(j)])
              : FormatClass::Number;
      add_cell(first_data_row + i, left + j, 1, 1, detail::numeric_text(rng, fc),
               detail::data_style(rng, spec.style_noise, fc), CellRole::Other);
    }

  // Aggregation row: "total" sits in the first left column, which is a
  // declared header column, so the non-Other label stays inside the header
  // region; its numbers carry formulas.
  if (with_agg) {
    const int r = t.n_rows - 1;
    const bool blank_total = rng.bernoulli(spec.blank_total_prob);
    CellStyle st = blank_total ? detail::data_style(rng, spec.style_noise, FormatClass::Other)
                               : detail::header_style(rng, spec.style_noise);
    st.format_class = blank_total ? FormatClass::Other : FormatClass::Text;
    add_cell(r, 0, 1, 1, blank_total ? "" : "total", st, CellRole::Aggregation);
    for (int c = 1; c < left; ++c)
      add_cell(r, c, 1, 1, "", detail::data_style(rng, spec.style_noise, FormatClass::Other),
               CellRole::Other);
    for (int j = 0; j < data_cols; ++j) {
      const FormatClass fc = detail::measure_format(col_measure[static_cast<size_t>(j)]);
      CellStyle st2 = detail::data_style(rng, spec.style_noise, fc);
      st2.has_formula = true;
      add_cell(r, left + j, 1, 1, detail::numeric_text(rng, fc), st2, CellRole::Other);
    }
  }
  return t;
}

inline std::vector<RawTable> generate_tables(const SyntheticSpec& spec) {
  std::vector<RawTable> tables;
  tables.reserve(static_cast<size_t>(spec.table_count));
  Rng seeder(spec.seed);
  for (int i = 0; i < spec.table_count; ++i) {
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "syn-%05d", i);
    tables.push_back(generate_table(spec, seeder.next_u64(), idbuf));
  }
  return tables;
}

/// Writes tables + manifest plus the demo taxonomy and lexicon files the
/// wordnet graph needs.
inline void write_synthetic_dataset(const std::filesystem::path& dir, const SyntheticSpec& spec) {
  save_dataset(dir, generate_tables(spec));
  write_file(dir / "taxonomy.tsv", demo_taxonomy_text());
  write_file(dir / "lexicon.tsv", demo_lexicon_text());
}

}  // namespace tabularnet
