/// @file fixtures.h
/// @brief Synthetic songs, bundles and WAV files for tests.

#pragma once

#include "rearrange/audio.h"
#include "rearrange/beat_grid.h"
#include "rearrange/features.h"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rearrange::testing {

/// Beats every 60/bpm seconds starting at pre_roll, a downbeat every g
/// beats, total duration pre_roll + n beats.
BeatGrid uniform_grid(std::size_t n_beats, double bpm = 120.0, int g = 4, int sample_rate = 8000,
                      double pre_roll = 0.0);

struct SongSpec {
  /// One letter per section; equal letters repeat the same material.
  std::string form = "AABB";
  int beats_per_section = 16;
  /// Per-section lengths overriding beats_per_section when non-empty.
  std::vector<int> section_beats;
  int beats_per_measure = 4;
  double bpm = 120.0;
  int sample_rate = 8000;
  int frames_per_beat = 4;
  int dims = 12;
  /// Per-frame Gaussian noise added to every feature.
  double noise = 0.05;
  double pre_roll = 0.0;
  std::uint64_t seed = 1;
  int channels = 1;
  SampleFormat format = SampleFormat::kPcm16;
};

struct SyntheticSong {
  FeatureBundle bundle;
  AudioBuffer audio;
  /// First beat of each section, plus the beat count at the end.
  std::vector<std::size_t> section_starts;
};

/// Frame-level repetition-embedding, repetition-cqt and homogeneity-embedding
/// features whose beat-level content is a function of (section letter, beat
/// within section), plus matching tone audio.
SyntheticSong make_song(const SongSpec& spec);

/// Writes audio.wav and the bundle (manifest.json + containers) into dir.
/// Returns the manifest path.
std::filesystem::path write_song(const std::filesystem::path& dir, const SyntheticSong& song);

/// Deterministic multi-tone test signal.
AudioBuffer tone_audio(double seconds, int sample_rate, int channels = 1,
                       SampleFormat format = SampleFormat::kPcm16, std::uint64_t seed = 7);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

std::vector<unsigned char> read_bytes(const std::filesystem::path& path);

}  // namespace rearrange::testing
