#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "paxsat/features.hpp"

namespace paxsat {

struct SmoteConfig {
  std::string minority_flag = "BSNFLIER";  // 0/1 column marking the minority class
  double target_share = 0.40;
  int k_neighbors = 1;
  std::uint64_t seed = 0;
  /// Columns spanning the interpolation distance space; empty means every
  /// column of the matrix.
  std::vector<std::string> feature_columns;
  bool standardize_distance = false;
  bool rebinarize_dummies = false;      // round interpolated 0/1 columns back
  bool interpolate_outcome = false;     // default copies the base row's outcome
};

/// Minority total after oversampling to `target_share`:
/// floor(n_majority * share / (1 - share)). Synthetic rows to add is the
/// result minus n_minority. Errors when the target does not exceed the
/// current share.
std::int64_t smote_target_count(std::int64_t n_majority, std::int64_t n_minority,
                                double target_share);

/// Appends synthetic minority rows: base rows cycle through the minority in
/// index order, each synthetic row is base + U(0,1) * (neighbor - base) with
/// the nearest minority neighbor by Euclidean distance (ties to the lowest
/// row index). Synthetic rows inherit the base row's outcome and cluster and
/// are marked in `synthetic`.
DesignMatrix smote_oversample(const DesignMatrix& m, const SmoteConfig& cfg);

}  // namespace paxsat
