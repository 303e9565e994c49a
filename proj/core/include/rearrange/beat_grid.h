/// @file beat_grid.h
/// @brief Beat and downbeat annotations of a recording.

#pragma once

#include <cstddef>
#include <vector>

namespace rearrange {

/// Beat times, downbeat times and meter of a recording.
///
/// Beat i covers the source interval [beat_start(i), beat_end(i)). The first
/// beat absorbs any audio before it (its start is 0 s) and the last beat
/// extends to total_duration, so the intervals tile the whole recording. When
/// total_duration does not lie after the last beat, the last beat lasts one
/// median beat duration instead.
struct BeatGrid {
  std::vector<double> beats;
  std::vector<double> downbeats;
  int beats_per_measure = 4;
  int sample_rate = 0;
  double total_duration = 0.0;

  /// Tolerance for matching a downbeat time to a beat time.
  static constexpr double kDownbeatTolerance = 1e-3;

  std::size_t size() const noexcept { return beats.size(); }

  /// Throws Error(kBeatGridMismatch / kInvalidArgument) on any violated
  /// invariant.
  void validate() const;

  double median_beat_duration() const;
  double mean_measure_duration() const;

  double beat_start(std::size_t i) const;
  double beat_end(std::size_t i) const;
  double beat_duration(std::size_t i) const { return beat_end(i) - beat_start(i); }
  std::vector<double> beat_durations() const;

  /// Beat index of every downbeat, in order.
  std::vector<std::size_t> downbeat_beat_indices() const;

  /// True if beat i sits on a downbeat.
  bool is_downbeat(std::size_t i) const;
};

/// Median of a non-empty sample (mean of the two middle values for even
/// sizes).
double median(std::vector<double> values);

}  // namespace rearrange
