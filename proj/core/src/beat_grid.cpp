#include "rearrange/beat_grid.h"

#include "rearrange/error.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rearrange {

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

bool strictly_ascending(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return !(a < b); }) ==
         v.end();
}

}  // namespace

void BeatGrid::validate() const {
  if (beats.size() < 2) {
    throw Error(ErrorKind::kBeatGridMismatch, "beat grid needs at least 2 beats");
  }
  if (beats_per_measure < 1) {
    throw Error(ErrorKind::kInvalidArgument, "beats_per_measure must be >= 1");
  }
  for (double t : beats) {
    if (!std::isfinite(t)) throw Error(ErrorKind::kNonFinite, "non-finite beat time");
  }
  for (double t : downbeats) {
    if (!std::isfinite(t)) throw Error(ErrorKind::kNonFinite, "non-finite downbeat time");
  }
  if (!std::isfinite(total_duration) || total_duration <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "total_duration must be positive");
  }
  if (!strictly_ascending(beats)) {
    throw Error(ErrorKind::kBeatGridMismatch, "beats not strictly ascending");
  }
  if (!strictly_ascending(downbeats)) {
    throw Error(ErrorKind::kBeatGridMismatch, "downbeats not strictly ascending");
  }
  const auto in_range = [this](double t) { return t >= 0.0 && t <= total_duration; };
  if (!std::all_of(beats.begin(), beats.end(), in_range) ||
      !std::all_of(downbeats.begin(), downbeats.end(), in_range)) {
    throw Error(ErrorKind::kBeatGridMismatch, "beat time outside [0, total_duration]");
  }
  for (double d : downbeats) {
    auto it = std::lower_bound(beats.begin(), beats.end(), d - kDownbeatTolerance);
    if (it == beats.end() || std::abs(*it - d) > kDownbeatTolerance) {
      std::ostringstream os;
      os << "downbeat not on beat grid (" << d << " s)";
      throw Error(ErrorKind::kBeatGridMismatch, os.str());
    }
  }
}

double BeatGrid::median_beat_duration() const {
  std::vector<double> intervals;
  intervals.reserve(beats.size());
  for (std::size_t i = 1; i < beats.size(); ++i) intervals.push_back(beats[i] - beats[i - 1]);
  return median(std::move(intervals));
}

double BeatGrid::mean_measure_duration() const {
  if (downbeats.size() >= 2) {
    return (downbeats.back() - downbeats.front()) / static_cast<double>(downbeats.size() - 1);
  }
  const double mean_beat = (beats.back() - beats.front()) / static_cast<double>(beats.size() - 1);
  return mean_beat * beats_per_measure;
}

double BeatGrid::beat_start(std::size_t i) const {
  return i == 0 ? 0.0 : beats[i];
}

double BeatGrid::beat_end(std::size_t i) const {
  if (i + 1 < beats.size()) return beats[i + 1];
  if (total_duration > beats.back()) return total_duration;
  return beats.back() + median_beat_duration();
}

std::vector<double> BeatGrid::beat_durations() const {
  std::vector<double> out(beats.size());
  for (std::size_t i = 0; i < beats.size(); ++i) out[i] = beat_duration(i);
  return out;
}

std::vector<std::size_t> BeatGrid::downbeat_beat_indices() const {
  std::vector<std::size_t> out;
  out.reserve(downbeats.size());
  for (double d : downbeats) {
    auto it = std::lower_bound(beats.begin(), beats.end(), d - kDownbeatTolerance);
    if (it != beats.end() && std::abs(*it - d) <= kDownbeatTolerance) {
      out.push_back(static_cast<std::size_t>(it - beats.begin()));
    }
  }
  return out;
}

bool BeatGrid::is_downbeat(std::size_t i) const {
  const auto idx = downbeat_beat_indices();
  return std::binary_search(idx.begin(), idx.end(), i);
}

}  // namespace rearrange
