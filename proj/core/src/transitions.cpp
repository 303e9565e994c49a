#include "rearrange/transitions.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace rearrange {

const char* to_string(TransitionKind kind) noexcept {
  switch (kind) {
    case TransitionKind::kSegment: return "segment";
    case TransitionKind::kInternal: return "internal";
    case TransitionKind::kBoundaryFallback: return "boundary_fallback";
  }
  return "unknown";
}

std::optional<TransitionKind> transition_kind_from_string(std::string_view s) noexcept {
  if (s == "segment") return TransitionKind::kSegment;
  if (s == "internal") return TransitionKind::kInternal;
  if (s == "boundary_fallback") return TransitionKind::kBoundaryFallback;
  return std::nullopt;
}

double assign_cost(std::size_t exit_beat, std::size_t entry_beat, const RecurrenceMatrix& r) {
  const double sim = r(static_cast<Eigen::Index>(exit_beat), static_cast<Eigen::Index>(entry_beat));
  const double cost = entry_beat > exit_beat ? 1.0 - sim : 1.0 - sim / 4.0;
  return std::clamp(cost, kMinTransitionCost, 1.0);
}

std::vector<DiagonalRun> enumerate_diagonal_runs(const RecurrenceMatrix& r, BeatRange cols,
                                                 BeatRange rows, int g, double threshold) {
  std::vector<DiagonalRun> runs;
  if (cols.first > cols.last || rows.first > rows.last || g < 1) return runs;
  const auto c0 = static_cast<std::ptrdiff_t>(cols.first);
  const auto c1 = static_cast<std::ptrdiff_t>(cols.last);
  const auto r0 = static_cast<std::ptrdiff_t>(rows.first);
  const auto r1 = static_cast<std::ptrdiff_t>(rows.last);

  // Offsets row - col reachable inside the window, stepping by g.
  const std::ptrdiff_t lo = r0 - c1;
  const std::ptrdiff_t hi = r1 - c0;
  std::ptrdiff_t start = lo - (((lo % g) + g) % g);
  if (start < lo) start += g;
  for (std::ptrdiff_t off = start; off <= hi; off += g) {
    if (off == 0) continue;
    const std::ptrdiff_t col_begin = std::max(c0, r0 - off);
    const std::ptrdiff_t col_end = std::min(c1, r1 - off);
    std::ptrdiff_t run_start = -1;
    for (std::ptrdiff_t c = col_begin; c <= col_end + 1; ++c) {
      const bool on = c <= col_end && r(static_cast<Eigen::Index>(c + off), static_cast<Eigen::Index>(c)) > threshold;
      if (on && run_start < 0) run_start = c;
      if (!on && run_start >= 0) {
        runs.push_back(DiagonalRun{static_cast<std::size_t>(run_start),
                                   static_cast<std::size_t>(run_start + off),
                                   static_cast<std::size_t>(c - run_start)});
        run_start = -1;
      }
    }
  }
  return runs;
}

namespace {

std::size_t chebyshev(std::size_t a_col, std::size_t a_row, std::size_t b_col, std::size_t b_row) {
  const auto dc = a_col > b_col ? a_col - b_col : b_col - a_col;
  const auto dr = a_row > b_row ? a_row - b_row : b_row - a_row;
  return std::max(dc, dr);
}

// Longest run, then midpoint closest to the anchor, then smaller |offset|,
// then forward before backward, then earlier column.
const DiagonalRun* pick_best(const std::vector<DiagonalRun>& runs, std::size_t min_length,
                             std::size_t anchor_col, std::size_t anchor_row) {
  const DiagonalRun* best = nullptr;
  auto key = [&](const DiagonalRun& d) {
    return std::make_tuple(-static_cast<std::ptrdiff_t>(d.length),
                           chebyshev(d.mid_col(), d.mid_row(), anchor_col, anchor_row),
                           std::abs(d.offset()), d.offset() < 0, d.col);
  };
  for (const auto& run : runs) {
    if (run.length < min_length) continue;
    if (best == nullptr || key(run) < key(*best)) best = &run;
  }
  return best;
}

bool same_label(const Segment& a, const Segment& b) {
  return a.level == b.level && a.label == b.label;
}

BeatRange clip(std::ptrdiff_t centre, std::ptrdiff_t radius, std::ptrdiff_t lo, std::ptrdiff_t hi) {
  return BeatRange{static_cast<std::size_t>(std::max(lo, centre - radius)),
                   static_cast<std::size_t>(std::min(hi, centre + radius))};
}

TransitionPoint from_run(const DiagonalRun& run, TransitionKind kind, const RecurrenceMatrix& r) {
  TransitionPoint t;
  t.exit_beat = run.mid_col();
  t.entry_beat = run.mid_row();
  t.kind = kind;
  t.diagonal_length = run.length;
  t.cost = assign_cost(t.exit_beat, t.entry_beat, r);
  return t;
}

}  // namespace

std::optional<TransitionPoint> find_segment_transition(const Segment& alpha, const Segment& beta,
                                                       const RecurrenceMatrix& r,
                                                       const BeatGrid& grid,
                                                       const TransitionOptions& options) {
  if (alpha.overlaps(beta) || same_label(alpha, beta)) return std::nullopt;
  const auto n = static_cast<std::ptrdiff_t>(r.size());
  const int g = grid.beats_per_measure;
  const auto window = static_cast<std::ptrdiff_t>(options.radius_measures) * g;
  const auto radius_a = std::min(window, static_cast<std::ptrdiff_t>(alpha.length()));
  const auto radius_b = std::min(window, static_cast<std::ptrdiff_t>(beta.length()));

  // Column 0 cannot be an exit: nothing plays before the first beat.
  const BeatRange cols = clip(static_cast<std::ptrdiff_t>(alpha.end_beat), radius_a, 1, n - 1);
  const BeatRange rows = clip(static_cast<std::ptrdiff_t>(beta.start_beat), radius_b, 0, n - 1);
  const auto runs = enumerate_diagonal_runs(r, cols, rows, g, options.run_threshold);
  const auto min_len = static_cast<std::size_t>(options.min_run_measures) * static_cast<std::size_t>(g);
  const DiagonalRun* best = pick_best(runs, min_len, alpha.end_beat, beta.start_beat);
  if (best == nullptr) return std::nullopt;
  return from_run(*best, TransitionKind::kSegment, r);
}

std::vector<TransitionPoint> find_internal_transitions(const Segment& seg, const RecurrenceMatrix& r,
                                                       const BeatGrid& grid,
                                                       const TransitionOptions& options) {
  const int g = grid.beats_per_measure;
  std::vector<TransitionPoint> out;
  if (seg.length() < 2 * static_cast<std::size_t>(g)) return out;
  const BeatRange span{std::max<std::size_t>(seg.start_beat, 1), seg.end_beat - 1};
  const BeatRange rows{seg.start_beat, seg.end_beat - 1};
  const auto runs = enumerate_diagonal_runs(r, span, rows, g, options.run_threshold);
  const auto min_len = static_cast<std::size_t>(options.min_run_measures) * static_cast<std::size_t>(g);

  std::vector<DiagonalRun> forward;
  std::vector<DiagonalRun> backward;
  for (const auto& run : runs) (run.offset() > 0 ? forward : backward).push_back(run);
  for (const auto* group : {&forward, &backward}) {
    if (const DiagonalRun* best = pick_best(*group, min_len, seg.start_beat, seg.start_beat)) {
      out.push_back(from_run(*best, TransitionKind::kInternal, r));
    }
  }
  return out;
}

std::vector<TransitionPoint> boundary_fallback_transitions(std::span<const Segment> segments,
                                                           std::size_t n_beats,
                                                           const SegmentPairSet& covered) {
  std::vector<TransitionPoint> out;
  for (std::size_t a = 0; a < segments.size(); ++a) {
    const Segment& alpha = segments[a];
    if (alpha.end_beat >= n_beats) continue;  // no beat after the last segment to replace
    for (std::size_t b = 0; b < segments.size(); ++b) {
      const Segment& beta = segments[b];
      if (a == b || alpha.overlaps(beta) || same_label(alpha, beta)) continue;
      if (alpha.end_beat == beta.start_beat) continue;  // natural continuation
      if (covered.count({a, b}) != 0) continue;
      TransitionPoint t;
      t.exit_beat = alpha.end_beat;
      t.entry_beat = beta.start_beat;
      t.cost = 1.0;
      t.kind = TransitionKind::kBoundaryFallback;
      t.alpha = a;
      t.beta = b;
      out.push_back(t);
    }
  }
  return out;
}

std::vector<TransitionPoint> merge_transitions(std::vector<TransitionPoint> transitions) {
  // Cheapest wins; equal costs prefer the more specific kind, then the
  // longer diagonal, then the earlier discovery.
  std::stable_sort(transitions.begin(), transitions.end(), [](const TransitionPoint& a, const TransitionPoint& b) {
    return std::make_tuple(a.exit_beat, a.entry_beat, a.cost, static_cast<int>(a.kind), -static_cast<std::ptrdiff_t>(a.diagonal_length)) <
           std::make_tuple(b.exit_beat, b.entry_beat, b.cost, static_cast<int>(b.kind), -static_cast<std::ptrdiff_t>(b.diagonal_length));
  });
  std::vector<TransitionPoint> out;
  for (const auto& t : transitions) {
    if (!out.empty() && out.back().exit_beat == t.exit_beat && out.back().entry_beat == t.entry_beat) continue;
    out.push_back(t);
  }
  return out;
}

std::vector<TransitionPoint> build_transition_set(const SegmentationHierarchy& hierarchy,
                                                  const RecurrenceMatrix& r, const BeatGrid& grid,
                                                  const TransitionOptions& options) {
  const auto segments = collect_global_segments(hierarchy);
  std::vector<TransitionPoint> all;
  SegmentPairSet covered;
  for (std::size_t a = 0; a < segments.size(); ++a) {
    for (std::size_t b = 0; b < segments.size(); ++b) {
      if (a == b) continue;
      auto t = find_segment_transition(segments[a], segments[b], r, grid, options);
      if (!t) continue;
      t->alpha = a;
      t->beta = b;
      all.push_back(*t);
      covered.emplace(a, b);
    }
  }
  for (std::size_t a = 0; a < segments.size(); ++a) {
    const Segment& seg = segments[a];
    if (std::find(options.internal_levels.begin(), options.internal_levels.end(), seg.level) ==
        options.internal_levels.end()) {
      continue;
    }
    for (auto t : find_internal_transitions(seg, r, grid, options)) {
      t.alpha = a;
      all.push_back(t);
    }
  }
  auto fallbacks = boundary_fallback_transitions(segments, grid.size(), covered);
  all.insert(all.end(), fallbacks.begin(), fallbacks.end());
  return merge_transitions(std::move(all));
}

}  // namespace rearrange
