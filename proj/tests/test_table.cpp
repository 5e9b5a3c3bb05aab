#include <gtest/gtest.h>

#include "support/test_util.hpp"
#include "tabularnet/dataset_io.hpp"
#include "tabularnet/split.hpp"
#include "tabularnet/table.hpp"

using namespace tabularnet;
using tabularnet::testing::make_cell;
using tabularnet::testing::TempDir;

namespace {

RawTable minimal_table() {
  RawTable t;
  t.id = "t";
  t.n_rows = 1;
  t.n_cols = 1;
  t.cells.push_back(make_cell(0, 0, "a"));
  return t;
}

TEST(ParseTable, MinimalOneCell) {
  const std::string doc = R"({
    "id": "mini", "n_rows": 1, "n_cols": 1,
    "cells": [{"row": 0, "col": 0, "text": "a"}]
  })";
  RawTable t = parse_table(doc);
  EXPECT_EQ(t.id, "mini");
  EXPECT_EQ(t.n_rows, 1);
  EXPECT_EQ(t.n_cols, 1);
  ASSERT_EQ(t.cells.size(), 1u);
  EXPECT_EQ(t.cells[0].text, "a");
}

TEST(ParseTable, MalformedSyntaxReportsByteOffset) {
  try {
    parse_table("{\"id\": \"x\", ");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos);
  }
}

TEST(ParseTable, OverlappingSpansNameOffendingCell) {
  const std::string doc = R"({
    "id": "dup", "n_rows": 2, "n_cols": 2,
    "cells": [
      {"row": 0, "col": 0, "row_span": 2, "col_span": 1, "text": "a"},
      {"row": 0, "col": 0, "text": "b"}
    ]
  })";
  try {
    parse_table(doc);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(0,0)"), std::string::npos);
  }
}

TEST(ParseTable, OutOfRangeSpanRejected) {
  RawTable t = minimal_table();
  t.cells[0].col_span = 2;
  EXPECT_THROW(validate(t), ValidationError);
}

TEST(ParseTable, HeaderIndexOutOfRangeRejected) {
  RawTable t = minimal_table();
  t.header_rows.push_back(3);
  EXPECT_THROW(validate(t), ValidationError);
}

TEST(ParseTable, LabeledCellsRoundTrip) {
  // Modeled on a small cross table: index name corner, year indexes,
  // a value-name column header.
  RawTable t;
  t.id = "fig2b";
  t.n_rows = 4;
  t.n_cols = 3;
  t.header_rows = {0, 1};
  t.header_cols = {0};
  t.cells.push_back(make_cell(0, 0, "country", 2, 1, CellRole::IndexName));
  t.cells.push_back(make_cell(0, 1, "amount", 1, 2, CellRole::ValueName));
  t.cells.push_back(make_cell(1, 1, "2013", 1, 1, CellRole::Index));
  t.cells.push_back(make_cell(1, 2, "2012", 1, 1, CellRole::Index));
  t.cells.push_back(make_cell(2, 0, "china", 1, 1, CellRole::Index));
  t.cells.push_back(make_cell(3, 0, "france", 1, 1, CellRole::Index));

  RawTable parsed = parse_table(serialize_table(t));
  ASSERT_EQ(parsed.cells.size(), t.cells.size());
  EXPECT_EQ(parsed.cells[0].label, CellRole::IndexName);
  EXPECT_EQ(parsed.cells[1].label, CellRole::ValueName);
  EXPECT_EQ(parsed.cells[2].label, CellRole::Index);
  EXPECT_EQ(parsed.header_rows, (std::vector<int>{0, 1}));
}

TEST(ParseTable, LargeTableRejectedWithoutOverride) {
  RawTable t;
  t.id = "big";
  t.n_rows = 100;
  t.n_cols = 51;  // 5100 cells
  EXPECT_THROW(validate(t), ValidationError);
  EXPECT_NO_THROW(validate(t, /*allow_large=*/true));
}

TEST(Normalize, MergedCellReplicatesEverywhere) {
  RawTable t;
  t.id = "m";
  t.n_rows = 2;
  t.n_cols = 2;
  RawCell c = make_cell(0, 0, "T", 2, 2);
  c.style.font_bold = true;
  t.cells.push_back(c);
  GridTable g = normalize(t);
  for (int r = 0; r < 2; ++r)
    for (int j = 0; j < 2; ++j) {
      EXPECT_EQ(g.at(r, j).text, "T");
      EXPECT_TRUE(g.at(r, j).style.font_bold);
      EXPECT_EQ(g.at(r, j).origin, (std::pair<int, int>{0, 0}));
    }
}

TEST(Normalize, NoMergesIsIdentityLayout) {
  RawTable t;
  t.id = "flat";
  t.n_rows = 2;
  t.n_cols = 2;
  t.cells = {make_cell(0, 0, "a"), make_cell(0, 1, "b"), make_cell(1, 0, "c"),
             make_cell(1, 1, "d")};
  GridTable g = normalize(t);
  EXPECT_EQ(g.at(0, 1).text, "b");
  EXPECT_EQ(g.at(1, 0).text, "c");
  EXPECT_EQ(g.at(1, 1).origin, (std::pair<int, int>{1, 1}));
}

TEST(Normalize, UncoveredPositionsBecomeDefaultCells) {
  RawTable t;
  t.id = "sparse";
  t.n_rows = 2;
  t.n_cols = 2;
  t.cells.push_back(make_cell(0, 0, "x", 1, 1, CellRole::Index));
  GridTable g = normalize(t);
  const GridCell& empty = g.at(1, 1);
  EXPECT_EQ(empty.text, "");
  EXPECT_EQ(empty.label, CellRole::Other);
  EXPECT_EQ(empty.style.fill_color, (Color{255, 255, 255, 255}));
  EXPECT_EQ(empty.style.font_color, (Color{0, 0, 0, 0}));
  EXPECT_EQ(empty.style.format_class, FormatClass::Other);
  EXPECT_EQ(empty.origin, (std::pair<int, int>{1, 1}));
}

TEST(Normalize, IdempotentThroughRawRoundTrip) {
  RawTable t;
  t.id = "round";
  t.n_rows = 3;
  t.n_cols = 2;
  RawCell merged = make_cell(0, 0, "hdr", 1, 2, CellRole::ValueName);
  merged.style.font_bold = true;
  t.cells = {merged, make_cell(1, 0, "a"), make_cell(2, 1, "b")};
  GridTable g = normalize(t);
  GridTable again = normalize(to_raw(g));
  EXPECT_TRUE(grid_equal(g, again));
}

TEST(Normalize, OriginCoversEveryPosition) {
  RawTable t;
  t.id = "cover";
  t.n_rows = 3;
  t.n_cols = 3;
  t.cells = {make_cell(0, 0, "big", 2, 2), make_cell(2, 2, "solo")};
  GridTable g = normalize(t);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      auto [orow, ocol] = g.at(r, c).origin;
      // The origin cell's span must cover (r, c); declared cells keep their
      // top-left corner, synthesized cells are their own origin.
      EXPECT_LE(orow, r);
      EXPECT_LE(ocol, c);
      EXPECT_EQ(g.at(orow, ocol).origin, g.at(r, c).origin);
      EXPECT_EQ(g.at(orow, ocol).text, g.at(r, c).text);
    }
}

TEST(DatasetIo, SaveLoadRoundTrip) {
  TempDir dir("tabnet-dataset");
  std::vector<RawTable> tables;
  for (int i = 0; i < 3; ++i) {
    RawTable t = minimal_table();
    t.id = "t" + std::to_string(i);
    tables.push_back(t);
  }
  save_dataset(dir.path(), tables);
  const auto loaded = load_dataset(dir.path());
  ASSERT_EQ(loaded.size(), 3u);
  EXPECT_EQ(loaded[1].id, "t1");
  EXPECT_EQ(loaded[1].at(0, 0).text, "a");
}

std::vector<GridTable> grid_tables(int n) {
  std::vector<GridTable> tables;
  for (int i = 0; i < n; ++i) {
    RawTable t = minimal_table();
    t.id = "t" + std::to_string(i);
    tables.push_back(normalize(t));
  }
  return tables;
}

TEST(SplitDataset, TenTablesSplitSevenOneTwo) {
  const auto split = split_dataset(grid_tables(10), 0.7, 0.1, 0.2, 7);
  EXPECT_EQ(split.train.size(), 7u);
  EXPECT_EQ(split.val.size(), 1u);
  EXPECT_EQ(split.test.size(), 2u);
}

TEST(SplitDataset, DeterministicForFixedSeed) {
  const auto a = split_dataset(grid_tables(10), 0.7, 0.1, 0.2, 7);
  const auto b = split_dataset(grid_tables(10), 0.7, 0.1, 0.2, 7);
  for (size_t i = 0; i < a.train.size(); ++i) EXPECT_EQ(a.train[i].id, b.train[i].id);
  for (size_t i = 0; i < a.test.size(); ++i) EXPECT_EQ(a.test[i].id, b.test[i].id);
}

TEST(SplitDataset, ThreeTablesAllowEmptyVal) {
  const auto split = split_dataset(grid_tables(3), 0.7, 0.1, 0.2, 1);
  EXPECT_EQ(split.train.size(), 2u);
  EXPECT_EQ(split.val.size(), 0u);
  EXPECT_EQ(split.test.size(), 1u);
}

TEST(SplitDataset, PartitionIsExactAndDisjoint) {
  const auto tables = grid_tables(23);
  const auto split = split_dataset(tables, 0.7, 0.1, 0.2, 42);
  std::set<std::string> seen;
  for (const auto* part : {&split.train, &split.val, &split.test})
    for (const GridTable& t : *part) EXPECT_TRUE(seen.insert(t.id).second) << "duplicate " << t.id;
  EXPECT_EQ(seen.size(), tables.size());
}

TEST(SplitDataset, RejectsBadInput) {
  EXPECT_THROW(split_dataset(grid_tables(2), 0.7, 0.1, 0.2, 0), ValidationError);
  EXPECT_THROW(split_dataset(grid_tables(5), 0.7, 0.1, 0.1, 0), ValidationError);
  EXPECT_THROW(split_dataset(grid_tables(5), 0.9, -0.1, 0.2, 0), ValidationError);
}

}  // namespace
