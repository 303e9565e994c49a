/// @file features.h
/// @brief Feature bundle loading, the built-in spectral fallback feature and
/// beat synchronization.

#pragma once

#include "rearrange/audio.h"
#include "rearrange/beat_grid.h"
#include "rearrange/error.h"
#include "rearrange/feature_matrix.h"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rearrange {

/// A validated beat grid plus every frame-level feature referenced by a
/// bundle manifest.
struct FeatureBundle {
  BeatGrid grid;
  std::vector<FeatureMatrix> features;
  /// Audio path as written in the manifest (possibly relative).
  std::string audio;
  /// Audio path resolved against the manifest directory.
  std::filesystem::path audio_path;

  const FeatureMatrix* find(const std::string& name) const;
};

// "FEA1" container: magic, u32 rows, u32 cols, u8 axis, [f64 frame times],
// f32 row-major values. Little-endian throughout.
std::vector<std::uint8_t> encode_feature_container(const FeatureMatrix& m);
FeatureMatrix decode_feature_container(std::span<const std::uint8_t> bytes,
                                       const std::string& name = {});
FeatureMatrix read_feature_container(const std::filesystem::path& path,
                                     const std::string& name = {});
void write_feature_container(const std::filesystem::path& path, const FeatureMatrix& m);

/// Loads and validates a bundle manifest and every container it references.
/// Relative paths are resolved against the manifest's directory. The
/// recording length comes from the optional "total_duration" key, else from
/// the audio file header, else from the last beat plus one median beat.
FeatureBundle load_feature_bundle(const std::filesystem::path& manifest_path,
                                  Diagnostics* diag = nullptr);

/// Writes manifest.json and one "<name>.fea" container per feature into dir.
/// Returns the manifest path.
std::filesystem::path write_bundle(const std::filesystem::path& dir, const FeatureBundle& bundle);

struct FallbackFeatureOptions {
  int hop = 512;
  int bands = 36;
  double min_hz = 32.7;
  double max_hz = 8000.0;
};

/// Log-power, log-frequency spectrogram pooled from an STFT. Stands in for a
/// precomputed CQT when the bundle has none. Stereo is averaged to mono.
FeatureMatrix compute_fallback_repetition_feature(const AudioBuffer& audio,
                                                  const FallbackFeatureOptions& options = {});

/// Band edges (bands + 1 values, Hz) used by the fallback feature.
std::vector<double> fallback_band_edges(const FallbackFeatureOptions& options = {});

/// FFT length used by the fallback feature at a given sample rate.
int fallback_fft_size(int sample_rate);

/// Mean of the frame rows falling in each beat interval [beats[i],
/// beats[i+1]) (last beat: [beats[N-1], total_duration]). Intervals with no
/// frame copy the row of the frame nearest to the interval.
FeatureMatrix beat_synchronize(const FeatureMatrix& m, const BeatGrid& grid);

}  // namespace rearrange
