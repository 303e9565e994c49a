/// @file oracles.h
/// @brief Straightforward reference implementations used to check the
/// optimized code paths.

#pragma once

#include "rearrange/beat_grid.h"
#include "rearrange/feature_matrix.h"
#include "rearrange/transitions.h"

#include <optional>
#include <tuple>
#include <vector>

namespace rearrange::testing {

/// Mutual kNN recurrence by full sorting of every row.
Matrix brute_force_recurrence(const Matrix& features, int k);

/// Beat durations recomputed from the raw grid arrays.
std::vector<double> oracle_beat_durations(const BeatGrid& grid);

struct OraclePath {
  std::vector<std::size_t> beats;
  double cost = 0.0;
};

/// Enumerates every beat sequence from beat 0 to the last beat whose steps
/// are continuations or transitions, over the admissible length window, and
/// returns the cheapest one meeting the duration radius (ties: lexicographic).
std::optional<OraclePath> exhaustive_best_path(const BeatGrid& grid,
                                               const std::vector<TransitionPoint>& transitions,
                                               double target);

struct OracleRun {
  std::size_t col, row, length;
  friend bool operator<(const OracleRun& a, const OracleRun& b) {
    return std::tie(a.col, a.row, a.length) < std::tie(b.col, b.row, b.length);
  }
  friend bool operator==(const OracleRun&, const OracleRun&) = default;
};

/// Diagonal runs found by scanning every window cell and extending only from
/// run heads.
std::vector<OracleRun> scan_diagonal_runs(const Matrix& r, BeatRange cols, BeatRange rows, int g,
                                          double threshold);

}  // namespace rearrange::testing
