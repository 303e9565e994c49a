// STFT-pooled log-frequency spectrogram used when a bundle carries no
// precomputed CQT.

#include "rearrange/features.h"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace rearrange {

int fallback_fft_size(int sample_rate) {
  // Smallest power of two with bin spacing <= 6 Hz, so the narrow low bands
  // still resolve.
  int n = 1024;
  while (static_cast<double>(sample_rate) / n > 6.0) n *= 2;
  return n;
}

std::vector<double> fallback_band_edges(const FallbackFeatureOptions& options) {
  std::vector<double> edges(static_cast<std::size_t>(options.bands) + 1);
  const double ratio = std::log(options.max_hz / options.min_hz);
  for (std::size_t b = 0; b < edges.size(); ++b) {
    edges[b] = options.min_hz * std::exp(ratio * static_cast<double>(b) / options.bands);
  }
  return edges;
}

FeatureMatrix compute_fallback_repetition_feature(const AudioBuffer& audio,
                                                  const FallbackFeatureOptions& options) {
  if (audio.samples.empty() || audio.frames() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "fallback feature: empty audio");
  }
  if (audio.sample_rate < 8000) {
    throw Error(ErrorKind::kInvalidArgument, "fallback feature: sample rate below 8000 Hz");
  }
  if (audio.frames() < static_cast<std::size_t>(audio.sample_rate)) {
    throw Error(ErrorKind::kInvalidArgument, "fallback feature: audio shorter than 1 s");
  }
  if (options.hop < 1 || options.bands < 1 || !(options.min_hz > 0.0) ||
      !(options.max_hz > options.min_hz)) {
    throw Error(ErrorKind::kInvalidArgument, "fallback feature: bad options");
  }

  const std::vector<float> mono = audio.mono();
  const auto n_samples = static_cast<std::ptrdiff_t>(mono.size());
  const int n_fft = fallback_fft_size(audio.sample_rate);
  const int n_bins = n_fft / 2 + 1;
  const double bin_hz = static_cast<double>(audio.sample_rate) / n_fft;
  const std::size_t n_frames = std::max<std::size_t>(1, mono.size() / static_cast<std::size_t>(options.hop));

  std::vector<double> window(static_cast<std::size_t>(n_fft));
  for (int i = 0; i < n_fft; ++i) {
    window[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n_fft);
  }

  // Map every bin to its band; bands without a bin centre borrow the bin
  // nearest their geometric centre.
  const auto edges = fallback_band_edges(options);
  std::vector<std::vector<int>> band_bins(static_cast<std::size_t>(options.bands));
  for (int k = 0; k < n_bins; ++k) {
    const double f = k * bin_hz;
    auto it = std::upper_bound(edges.begin(), edges.end(), f);
    if (it == edges.begin() || it == edges.end()) continue;
    band_bins[static_cast<std::size_t>(it - edges.begin() - 1)].push_back(k);
  }
  for (std::size_t b = 0; b < band_bins.size(); ++b) {
    if (!band_bins[b].empty()) continue;
    const double centre = std::sqrt(edges[b] * edges[b + 1]);
    band_bins[b].push_back(std::min(n_bins - 1, static_cast<int>(std::lround(centre / bin_hz))));
  }

  FeatureMatrix out;
  out.name = feature_names::kRepetitionCqt;
  out.axis = Axis::kFrames;
  out.values.resize(static_cast<Eigen::Index>(n_frames), options.bands);
  out.frame_times.resize(n_frames);

  Eigen::FFT<double> fft;
  std::vector<double> frame(static_cast<std::size_t>(n_fft));
  std::vector<std::complex<double>> spectrum;
  std::vector<double> power(static_cast<std::size_t>(n_bins));
  for (std::size_t t = 0; t < n_frames; ++t) {
    const std::ptrdiff_t centre = static_cast<std::ptrdiff_t>(t) * options.hop;
    for (int i = 0; i < n_fft; ++i) {
      const std::ptrdiff_t s = centre - n_fft / 2 + i;
      const double x = (s >= 0 && s < n_samples) ? mono[static_cast<std::size_t>(s)] : 0.0;
      frame[static_cast<std::size_t>(i)] = x * window[static_cast<std::size_t>(i)];
    }
    fft.fwd(spectrum, frame);
    for (int k = 0; k < n_bins; ++k) power[static_cast<std::size_t>(k)] = std::norm(spectrum[static_cast<std::size_t>(k)]);
    for (std::size_t b = 0; b < band_bins.size(); ++b) {
      double acc = 0.0;
      for (int k : band_bins[b]) acc += power[static_cast<std::size_t>(k)];
      out.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(b)) = 10.0 * std::log10(acc + 1e-10);
    }
    out.frame_times[t] = static_cast<double>(centre) / audio.sample_rate;
  }
  return out;
}

}  // namespace rearrange
