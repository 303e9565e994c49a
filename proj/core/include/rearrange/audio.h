/// @file audio.h
/// @brief In-memory audio buffer and WAV file I/O.

#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace rearrange {

enum class SampleFormat { kPcm16, kPcm24, kFloat32 };

/// Interleaved audio samples in [-1, 1] with the on-disk format remembered so
/// a file can be written back bit-exactly.
struct AudioBuffer {
  int sample_rate = 0;
  int channels = 1;
  SampleFormat format = SampleFormat::kPcm16;
  std::vector<float> samples;

  std::size_t frames() const noexcept {
    return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0;
  }
  double duration() const noexcept {
    return sample_rate > 0 ? static_cast<double>(frames()) / sample_rate : 0.0;
  }

  /// Channel average.
  std::vector<float> mono() const;
};

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  SampleFormat format = SampleFormat::kPcm16;
  std::size_t frames = 0;
};

WavInfo read_wav_info(const std::filesystem::path& path);
AudioBuffer read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

/// Encodes to an in-memory RIFF/WAVE image; write_wav writes exactly these
/// bytes.
std::vector<unsigned char> encode_wav(const AudioBuffer& audio);
AudioBuffer decode_wav(const std::vector<unsigned char>& bytes);

}  // namespace rearrange
