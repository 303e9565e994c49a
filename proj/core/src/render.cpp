#include "rearrange/render.h"

#include "rearrange/error.h"

#include <cmath>
#include <numbers>
#include <sstream>

namespace rearrange {

double SplicePlan::duration() const noexcept {
  double total = 0.0;
  for (const auto& s : spans) total += s.duration();
  return total;
}

SplicePlan compress_path(const BeatPath& path, const BeatGrid& grid, double crossfade_ms) {
  SplicePlan plan;
  plan.crossfade_ms = crossfade_ms;
  const auto& beats = path.beats;
  std::size_t run_start = 0;
  for (std::size_t l = 1; l <= beats.size(); ++l) {
    if (l < beats.size() && beats[l] == beats[l - 1] + 1) continue;
    if (l > run_start) {
      plan.spans.push_back(Span{grid.beat_start(beats[run_start]), grid.beat_end(beats[l - 1])});
    }
    run_start = l;
  }
  for (const auto& j : path.jumps) plan.jump_costs.push_back(j.transition.cost);
  return plan;
}

std::pair<double, double> crossfade_gains(CrossfadeLaw law, std::size_t n, std::size_t length) {
  // Sample-centred position in (0, 1).
  const double x = (static_cast<double>(n) + 0.5) / static_cast<double>(length);
  if (law == CrossfadeLaw::kLinear) return {1.0 - x, x};
  const double theta = 0.5 * std::numbers::pi * x;
  return {std::cos(theta), std::sin(theta)};
}

std::size_t to_sample(double seconds, int sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

std::size_t crossfade_samples(const SplicePlan& plan, int sample_rate) {
  return static_cast<std::size_t>(std::llround(plan.crossfade_ms * 1e-3 * sample_rate));
}

std::size_t rendered_frames(const SplicePlan& plan, int sample_rate) {
  std::size_t total = 0;
  for (const auto& s : plan.spans) total += to_sample(s.source_end, sample_rate) - to_sample(s.source_start, sample_rate);
  const std::size_t junctions = plan.spans.empty() ? 0 : plan.spans.size() - 1;
  return total - junctions * crossfade_samples(plan, sample_rate);
}

AudioBuffer render_audio(const SplicePlan& plan, const AudioBuffer& audio, CrossfadeLaw law) {
  if (plan.spans.empty()) throw Error(ErrorKind::kInvalidArgument, "splice plan has no spans");
  if (plan.crossfade_ms < 0.0 || plan.crossfade_ms > 200.0) {
    throw Error(ErrorKind::kInvalidArgument, "crossfade must lie in [0, 200] ms");
  }
  const int sr = audio.sample_rate;
  const auto ch = static_cast<std::size_t>(audio.channels);
  const std::size_t frames = audio.frames();
  const std::size_t fade = plan.spans.size() > 1 ? crossfade_samples(plan, sr) : 0;

  struct SampleSpan {
    std::size_t begin;
    std::size_t end;
  };
  std::vector<SampleSpan> spans;
  for (const auto& s : plan.spans) {
    const std::size_t b = to_sample(s.source_start, sr);
    const std::size_t e = to_sample(s.source_end, sr);
    if (!(s.source_start >= 0.0) || e > frames || e <= b) {
      std::ostringstream os;
      os << "span [" << s.source_start << ", " << s.source_end << ") s outside the "
         << audio.duration() << " s recording";
      throw Error(ErrorKind::kOutOfRange, os.str());
    }
    if (2 * fade > e - b) {
      throw Error(ErrorKind::kInvalidArgument, "crossfade longer than half a span");
    }
    spans.push_back({b, e});
  }

  AudioBuffer out;
  out.sample_rate = sr;
  out.channels = audio.channels;
  out.format = audio.format;
  out.samples.reserve(rendered_frames(plan, sr) * ch);

  const auto src = [&](std::size_t frame, std::size_t c) { return static_cast<double>(audio.samples[frame * ch + c]); };
  for (std::size_t s = 0; s < spans.size(); ++s) {
    // The first `fade` frames of every span after the first were already
    // mixed into the previous junction.
    const std::size_t head = s == 0 ? spans[s].begin : spans[s].begin + fade;
    const std::size_t tail = s + 1 == spans.size() ? spans[s].end : spans[s].end - fade;
    for (std::size_t f = head; f < tail; ++f) {
      for (std::size_t c = 0; c < ch; ++c) out.samples.push_back(audio.samples[f * ch + c]);
    }
    if (s + 1 == spans.size()) break;
    const std::size_t next = spans[s + 1].begin;
    for (std::size_t n = 0; n < fade; ++n) {
      const auto [g_out, g_in] = crossfade_gains(law, n, fade);
      for (std::size_t c = 0; c < ch; ++c) {
        out.samples.push_back(static_cast<float>(g_out * src(tail + n, c) + g_in * src(next + n, c)));
      }
    }
  }
  return out;
}

}  // namespace rearrange
