/// @file pathfinder.h
/// @brief Constrained shortest beat paths over a layered graph.

#pragma once

#include "rearrange/beat_grid.h"
#include "rearrange/transitions.h"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rearrange {

struct Jump {
  /// Index in BeatPath::beats of the beat played just before the jump.
  std::size_t position = 0;
  TransitionPoint transition;
};

struct BeatPath {
  std::vector<std::size_t> beats;
  double total_cost = 0.0;
  double realized_duration = 0.0;
  std::vector<Jump> jumps;
};

/// Graph over (beat, layer) vertices. Layer l holds the l-th beat of the
/// output; every edge moves one layer up. Beat-level edges are stored once
/// and shared by all layers.
class LayeredGraph {
 public:
  struct Edge {
    std::size_t to = 0;
    double cost = 0.0;
    /// Index into the transition list, or kNoSegment for a continuation.
    std::size_t transition = kNoSegment;
  };

  /// Throws Error(kOutOfRange) if a transition references a beat outside
  /// [0, n_beats) or has exit beat 0.
  LayeredGraph(std::size_t n_beats, std::span<const TransitionPoint> transitions,
               std::size_t n_layers);

  std::size_t n_beats() const noexcept { return n_beats_; }
  std::size_t n_layers() const noexcept { return n_layers_; }
  std::size_t vertex_count() const noexcept { return n_beats_ * n_layers_; }
  std::size_t edge_count() const noexcept;

  std::size_t vertex(std::size_t beat, std::size_t layer) const noexcept {
    return layer * n_beats_ + beat;
  }

  /// Out-edges of a beat, sorted by target beat. Parallel edges keep the
  /// cheapest cost.
  std::span<const Edge> edges_from(std::size_t beat) const noexcept;

  /// Cheapest beat-level edge a -> b, if any.
  const Edge* find_edge(std::size_t from, std::size_t to) const noexcept;

  /// Dijkstra from (beat 0, layer 0); distances indexed by vertex id
  /// (infinity where unreachable).
  std::vector<double> shortest_distances() const;

  /// Cheapest path of exactly `length` beats from beat 0 to the last beat,
  /// lexicographically smallest among equal-cost ones. Uses distances from
  /// shortest_distances().
  std::optional<std::vector<std::size_t>> extract_path(const std::vector<double>& dist,
                                                      std::size_t length) const;

 private:
  std::size_t n_beats_;
  std::size_t n_layers_;
  std::vector<std::vector<Edge>> adjacency_;
};

/// Source duration of a beat sequence.
double path_duration(const BeatGrid& grid, std::span<const std::size_t> beats);

/// Fills total_cost, realized_duration and jumps for a beat sequence.
BeatPath make_path(const BeatGrid& grid, std::span<const TransitionPoint> transitions,
                   std::vector<std::size_t> beats);

/// Cheapest path of exactly `length` beats, ignoring the duration radius.
std::optional<BeatPath> solve_fixed_length(const BeatGrid& grid,
                                           std::span<const TransitionPoint> transitions,
                                           std::size_t length);

/// Shortest path whose duration lies within one mean measure of the target.
/// Path lengths L0 - 2g .. L0 + 2g are tried, L0 = round(target / median
/// beat duration); the cheapest admissible one wins, ties going to the
/// lexicographically smallest beat sequence. Throws InfeasibleError when no
/// length qualifies.
BeatPath solve(const BeatGrid& grid, std::span<const TransitionPoint> transitions,
               double target_duration);

struct ValidationReport {
  bool starts_at_first_beat = false;
  bool ends_at_last_beat = false;
  bool transitions_exist = false;
  bool duration_within_radius = false;
  bool cost_consistent = false;
  std::vector<std::string> messages;

  bool ok() const noexcept {
    return starts_at_first_beat && ends_at_last_beat && transitions_exist &&
           duration_within_radius && cost_consistent;
  }
};

/// Re-checks a path against the grid and transition set without using the
/// solver.
ValidationReport validate_path(const BeatPath& path, const BeatGrid& grid,
                               std::span<const TransitionPoint> transitions, double target);

}  // namespace rearrange
