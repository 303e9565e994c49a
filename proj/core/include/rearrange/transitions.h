/// @file transitions.h
/// @brief Transition points between and within structural segments.
///
/// A transition (exit_beat i, entry_beat j) says beat j can stand in for
/// beat i: playback runs up to beat i - 1 and continues at beat j. Forward
/// transitions (j > i) drop j - i beats, backward ones (j < i) repeat i - j
/// beats. Diagonal-derived transitions keep j - i a multiple of the meter,
/// so the measure position is preserved across the splice.

#pragma once

#include "rearrange/beat_grid.h"
#include "rearrange/recurrence.h"
#include "rearrange/segmentation.h"

#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string_view>
#include <span>
#include <utility>
#include <vector>

namespace rearrange {

enum class TransitionKind { kSegment, kInternal, kBoundaryFallback };

const char* to_string(TransitionKind kind) noexcept;
std::optional<TransitionKind> transition_kind_from_string(std::string_view s) noexcept;

inline constexpr std::size_t kNoSegment = std::numeric_limits<std::size_t>::max();

struct TransitionPoint {
  std::size_t exit_beat = 0;
  std::size_t entry_beat = 0;
  double cost = 1.0;
  TransitionKind kind = TransitionKind::kBoundaryFallback;
  std::size_t diagonal_length = 0;
  /// Indices into collect_global_segments(); beta is kNoSegment for internal
  /// transitions.
  std::size_t alpha = kNoSegment;
  std::size_t beta = kNoSegment;

  bool forward() const noexcept { return entry_beat > exit_beat; }
};

struct TransitionOptions {
  int radius_measures = 4;
  int min_run_measures = 1;
  /// Entries strictly above this value count as connected.
  double run_threshold = 0.0;
  std::vector<int> internal_levels{4, 5, 6};
};

/// A maximal run of connected entries on one diagonal: column (current beat)
/// col + t pairs with row (target beat) row + t for t in [0, length).
struct DiagonalRun {
  std::size_t col = 0;
  std::size_t row = 0;
  std::size_t length = 0;

  std::ptrdiff_t offset() const noexcept {
    return static_cast<std::ptrdiff_t>(row) - static_cast<std::ptrdiff_t>(col);
  }
  std::size_t mid_col() const noexcept { return col + length / 2; }
  std::size_t mid_row() const noexcept { return row + length / 2; }
};

/// Inclusive beat index range.
struct BeatRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

/// Maximal runs of entries > threshold inside the window, on diagonals whose
/// offset (row - col) is a nonzero multiple of g.
std::vector<DiagonalRun> enumerate_diagonal_runs(const RecurrenceMatrix& r, BeatRange cols,
                                                 BeatRange rows, int g, double threshold);

/// 1 - R(i, j) forward, 1 - R(i, j) / 4 backward, floored at 1e-6.
double assign_cost(std::size_t exit_beat, std::size_t entry_beat, const RecurrenceMatrix& r);

inline constexpr double kMinTransitionCost = 1e-6;

/// Searches columns around alpha's end and rows around beta's start for the
/// longest qualifying diagonal run, ties going to the run whose midpoint is
/// closest (Chebyshev) to (column end(alpha), row start(beta)). Returns its
/// midpoint. Same-level pairs sharing a label are never connected.
std::optional<TransitionPoint> find_segment_transition(const Segment& alpha, const Segment& beta,
                                                       const RecurrenceMatrix& r,
                                                       const BeatGrid& grid,
                                                       const TransitionOptions& options = {});

/// Best forward and best backward diagonal run inside the segment's own
/// submatrix (offsets at least one measure), ranked by length then
/// closeness of the midpoint to the segment start.
std::vector<TransitionPoint> find_internal_transitions(const Segment& seg,
                                                       const RecurrenceMatrix& r,
                                                       const BeatGrid& grid,
                                                       const TransitionOptions& options = {});

/// Pairs of segments (indices into `segments`) already joined by a diagonal
/// transition.
using SegmentPairSet = std::set<std::pair<std::size_t, std::size_t>>;

/// (end(alpha) -> start(beta), cost 1) for every ordered, non-overlapping,
/// label-compatible pair not listed in `covered`.
std::vector<TransitionPoint> boundary_fallback_transitions(std::span<const Segment> segments,
                                                           std::size_t n_beats,
                                                           const SegmentPairSet& covered = {});

/// Deduplicates by (exit, entry) keeping the cheapest and sorts by
/// (exit, entry).
std::vector<TransitionPoint> merge_transitions(std::vector<TransitionPoint> transitions);

/// Segment transitions over all ordered non-overlapping pairs of the global
/// segment set, internal transitions for the configured levels and boundary
/// fallbacks, merged.
std::vector<TransitionPoint> build_transition_set(const SegmentationHierarchy& hierarchy,
                                                  const RecurrenceMatrix& r,
                                                  const BeatGrid& grid,
                                                  const TransitionOptions& options = {});

}  // namespace rearrange
