/// @file segmentation.h
/// @brief Multi-level spectral segmentation of the beat axis.

#pragma once

#include "rearrange/beat_grid.h"
#include "rearrange/error.h"
#include "rearrange/feature_matrix.h"
#include "rearrange/recurrence.h"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace rearrange {

/// Beats [start_beat, end_beat) assigned to cluster `label` at level `level`.
struct Segment {
  int level = 1;
  int label = 0;
  std::size_t start_beat = 0;
  std::size_t end_beat = 0;

  std::size_t length() const noexcept { return end_beat - start_beat; }
  bool overlaps(const Segment& other) const noexcept {
    return start_beat < other.end_beat && other.start_beat < end_beat;
  }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentationHierarchy {
  std::map<int, std::vector<Segment>> levels;
  /// Ascending eigenvalues of the Laplacian (all of them).
  std::vector<double> eigenvalues;
  /// Leading eigenvectors as columns, N x k_max.
  Matrix eigenvectors;
};

struct SegmentationOptions {
  int k_max = 12;
  /// Scale each embedded beat to unit length before clustering.
  bool normalize_rows = false;
  std::uint64_t seed = 0;
  int restarts = 50;
  /// Stop after the first level that produces a segment at most this long.
  std::optional<double> min_segment_sec;
};

/// I - D^-1/2 R D^-1/2 with D the row sums of R; zero rows use D = 1.
Matrix normalized_laplacian(const RecurrenceMatrix& r);

/// Per-beat labels to contiguous segments split at label change-points.
std::vector<Segment> segments_from_labels(int level, std::span<const int> labels);

/// Clusters the first k eigenvectors of the Laplacian into k groups for
/// every k in 1..k_max. Eigenvectors follow ascending eigenvalues and are
/// sign-fixed so their largest-magnitude entry is positive.
SegmentationHierarchy segment_levels(const Matrix& laplacian, const BeatGrid& grid,
                                     const SegmentationOptions& options = {},
                                     Diagnostics* diag = nullptr);

/// Moves every interior boundary to the beat of the temporally closest
/// downbeat (ties go to the earlier one), drops segments that collapse to
/// zero length, and fuses neighbours left with equal labels.
SegmentationHierarchy quantize_to_downbeats(const SegmentationHierarchy& h, const BeatGrid& grid);

/// All segments of all levels, ordered by level then position, without
/// duplicate (level, start, end) entries.
std::vector<Segment> collect_global_segments(const SegmentationHierarchy& h);

}  // namespace rearrange
