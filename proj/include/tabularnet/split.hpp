#pragma once

#include <cmath>
#include <tuple>
#include <vector>

#include "tabularnet/common.hpp"
#include "tabularnet/rng.hpp"
#include "tabularnet/table.hpp"

namespace tabularnet {

struct DatasetSplit {
  std::vector<GridTable> train;
  std::vector<GridTable> val;
  std::vector<GridTable> test;
};

/// Partitions tables into train/val/test by whole table, deterministically
/// for a fixed seed. Set sizes come from cumulative-floor boundaries, e.g.
/// 10 tables at (0.7,0.1,0.2) give (7,1,2) and 3 tables give (2,0,1).
inline DatasetSplit split_dataset(const std::vector<GridTable>& tables, double train_ratio,
                                  double val_ratio, double test_ratio, std::uint64_t seed) {
  if (train_ratio <= 0 || val_ratio <= 0 || test_ratio <= 0)
    throw ValidationError("split ratios must be positive");
  if (std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
    throw ValidationError("split ratios must sum to 1");
  const size_t n = tables.size();
  if (n < 3) throw ValidationError("need at least 3 tables to split, got " + std::to_string(n));

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  // The 1e-9 guard keeps exact boundaries (0.7 * 10) from landing one short
  // through binary rounding.
  const auto n_train = static_cast<size_t>(std::floor(train_ratio * static_cast<double>(n) + 1e-9));
  const auto n_train_val = static_cast<size_t>(
      std::floor((train_ratio + val_ratio) * static_cast<double>(n) + 1e-9));

  DatasetSplit out;
  for (size_t i = 0; i < n; ++i) {
    const GridTable& t = tables[order[i]];
    if (i < n_train)
      out.train.push_back(t);
    else if (i < n_train_val)
      out.val.push_back(t);
    else
      out.test.push_back(t);
  }
  if (out.val.empty()) warn("validation split is empty; early stopping will be disabled");
  return out;
}

}  // namespace tabularnet
