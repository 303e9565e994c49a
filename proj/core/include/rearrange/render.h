/// @file render.h
/// @brief Splice plans and crossfaded rendering.

#pragma once

#include "rearrange/audio.h"
#include "rearrange/beat_grid.h"
#include "rearrange/pathfinder.h"

#include <cstddef>
#include <utility>
#include <vector>

namespace rearrange {

struct Span {
  double source_start = 0.0;
  double source_end = 0.0;

  double duration() const noexcept { return source_end - source_start; }
};

struct SplicePlan {
  std::vector<Span> spans;
  std::vector<double> jump_costs;
  double crossfade_ms = 50.0;

  double duration() const noexcept;
};

/// Collapses maximal runs of consecutive beats into source spans.
SplicePlan compress_path(const BeatPath& path, const BeatGrid& grid, double crossfade_ms = 50.0);

enum class CrossfadeLaw {
  /// sin/cos gains, g_out^2 + g_in^2 = 1.
  kEqualPower,
  /// Linear gains, g_out + g_in = 1.
  kLinear,
};

/// Fade-out and fade-in gains at crossfade sample n of `length`.
std::pair<double, double> crossfade_gains(CrossfadeLaw law, std::size_t n, std::size_t length);

/// Sample index for a source time (nearest sample).
std::size_t to_sample(double seconds, int sample_rate);

/// Number of crossfade samples for a plan at a sample rate.
std::size_t crossfade_samples(const SplicePlan& plan, int sample_rate);

/// Concatenates the spans, overlapping the tail of each span with the head of
/// the next for crossfade_ms. Output length is the summed span lengths minus
/// one crossfade per junction. Channel count and sample format follow the
/// input.
AudioBuffer render_audio(const SplicePlan& plan, const AudioBuffer& audio,
                         CrossfadeLaw law = CrossfadeLaw::kEqualPower);

/// Expected rendered length in frames.
std::size_t rendered_frames(const SplicePlan& plan, int sample_rate);

}  // namespace rearrange
