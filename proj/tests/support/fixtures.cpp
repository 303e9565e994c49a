#include "fixtures.h"

#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unistd.h>

namespace rearrange::testing {

namespace fs = std::filesystem;

BeatGrid uniform_grid(std::size_t n_beats, double bpm, int g, int sample_rate, double pre_roll) {
  BeatGrid grid;
  const double period = 60.0 / bpm;
  for (std::size_t i = 0; i < n_beats; ++i) {
    grid.beats.push_back(pre_roll + static_cast<double>(i) * period);
    if (i % static_cast<std::size_t>(g) == 0) grid.downbeats.push_back(grid.beats.back());
  }
  grid.beats_per_measure = g;
  grid.sample_rate = sample_rate;
  grid.total_duration = pre_roll + static_cast<double>(n_beats) * period;
  return grid;
}

namespace {

Matrix random_patterns(std::mt19937_64& rng, int rows, int dims) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, dims);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < dims; ++c) m(r, c) = normal(rng);
  return m;
}

}  // namespace

SyntheticSong make_song(const SongSpec& spec) {
  SyntheticSong song;
  const std::size_t n_sections = spec.form.size();
  std::vector<int> lengths = spec.section_beats;
  if (lengths.empty()) lengths.assign(n_sections, spec.beats_per_section);
  if (lengths.size() != n_sections) throw std::invalid_argument("section_beats must match form");
  song.section_starts.push_back(0);
  for (int len : lengths) song.section_starts.push_back(song.section_starts.back() + static_cast<std::size_t>(len));
  const std::size_t n_beats = song.section_starts.back();
  song.bundle.grid = uniform_grid(n_beats, spec.bpm, spec.beats_per_measure, spec.sample_rate, spec.pre_roll);
  const BeatGrid& grid = song.bundle.grid;

  // Section index and position within it for every beat.
  std::vector<std::size_t> section_of(n_beats);
  std::vector<Eigen::Index> pos_of(n_beats);
  for (std::size_t s = 0; s < n_sections; ++s) {
    for (std::size_t b = song.section_starts[s]; b < song.section_starts[s + 1]; ++b) {
      section_of[b] = s;
      pos_of[b] = static_cast<Eigen::Index>(b - song.section_starts[s]);
    }
  }

  std::mt19937_64 rng(spec.seed);
  // Per letter: beat-position patterns for both repetition features and one
  // section-wide colour shared by all features.
  std::map<char, Matrix> pat_x, pat_y, colour;
  for (std::size_t s = 0; s < n_sections; ++s) {
    const char c = spec.form[s];
    if (pat_x.count(c)) {
      if (pat_x[c].rows() != lengths[s]) throw std::invalid_argument("repeated sections must have equal length");
      continue;
    }
    pat_x[c] = random_patterns(rng, lengths[s], spec.dims);
    pat_y[c] = random_patterns(rng, lengths[s], spec.dims);
    colour[c] = 3.0 * random_patterns(rng, 1, spec.dims);
  }

  const std::size_t fpb = static_cast<std::size_t>(spec.frames_per_beat);
  const std::size_t n_frames = n_beats * fpb;
  const double period = 60.0 / spec.bpm;
  std::normal_distribution<double> noise(0.0, spec.noise);
  auto make = [&](const char* name) {
    FeatureMatrix f;
    f.name = name;
    f.axis = Axis::kFrames;
    f.values = Matrix::Zero(static_cast<Eigen::Index>(n_frames), spec.dims);
    return f;
  };
  FeatureMatrix x = make(feature_names::kRepetitionEmbedding);
  FeatureMatrix y = make(feature_names::kRepetitionCqt);
  FeatureMatrix z = make(feature_names::kHomogeneityEmbedding);
  for (std::size_t fr = 0; fr < n_frames; ++fr) {
    const std::size_t beat = fr / fpb;
    const char c = spec.form[section_of[beat]];
    const Eigen::Index t = pos_of[beat];
    const double time = grid.beats[beat] + period * static_cast<double>(fr % fpb) / static_cast<double>(fpb);
    x.frame_times.push_back(time);
    y.frame_times.push_back(time);
    z.frame_times.push_back(time);
    const auto r = static_cast<Eigen::Index>(fr);
    for (Eigen::Index d = 0; d < spec.dims; ++d) {
      x.values(r, d) = colour[c](0, d) + pat_x[c](t, d) + noise(rng);
      y.values(r, d) = colour[c](0, d) + pat_y[c](t, d) + noise(rng);
      z.values(r, d) = colour[c](0, d) + 0.2 * pat_x[c](t, d) + noise(rng);
    }
  }
  song.bundle.features = {x, y, z};
  song.bundle.audio = "audio.wav";

  // Audio: one tone per beat, pitch set by (letter, beat in section).
  AudioBuffer& a = song.audio;
  a.sample_rate = spec.sample_rate;
  a.channels = spec.channels;
  a.format = spec.format;
  const auto total_frames = static_cast<std::size_t>(std::llround(grid.total_duration * spec.sample_rate));
  a.samples.assign(total_frames * static_cast<std::size_t>(spec.channels), 0.0f);
  for (std::size_t n = 0; n < total_frames; ++n) {
    const double t = static_cast<double>(n) / spec.sample_rate;
    double value = 0.0;
    if (t >= spec.pre_roll) {
      const auto beat = std::min(n_beats - 1, static_cast<std::size_t>((t - spec.pre_roll) / period));
      const char c = spec.form[section_of[beat]];
      const double pos = static_cast<double>(pos_of[beat]);
      const double hz = 110.0 * std::pow(2.0, (static_cast<double>(c - 'A') * 5.0 + pos) / 12.0);
      value = 0.4 * std::sin(2.0 * std::numbers::pi * hz * t);
    }
    for (int ch = 0; ch < spec.channels; ++ch) {
      a.samples[n * static_cast<std::size_t>(spec.channels) + static_cast<std::size_t>(ch)] =
          static_cast<float>(value * (ch == 0 ? 1.0 : 0.8));
    }
  }
  // Quantize through the codec so the buffer equals what a reader returns.
  a = decode_wav(encode_wav(a));
  return song;
}

fs::path write_song(const fs::path& dir, const SyntheticSong& song) {
  fs::create_directories(dir);
  write_wav(dir / "audio.wav", song.audio);
  return write_bundle(dir, song.bundle);
}

AudioBuffer tone_audio(double seconds, int sample_rate, int channels, SampleFormat format,
                       std::uint64_t seed) {
  AudioBuffer a;
  a.sample_rate = sample_rate;
  a.channels = channels;
  a.format = format;
  const auto frames = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  a.samples.resize(frames * static_cast<std::size_t>(channels));
  for (std::size_t n = 0; n < frames; ++n) {
    const double t = static_cast<double>(n) / sample_rate;
    for (int ch = 0; ch < channels; ++ch) {
      const double v = 0.3 * std::sin(2.0 * std::numbers::pi * (220.0 + 110.0 * ch) * t) +
                       0.2 * std::sin(2.0 * std::numbers::pi * 331.0 * t) + jitter(rng);
      a.samples[n * static_cast<std::size_t>(channels) + static_cast<std::size_t>(ch)] = static_cast<float>(v);
    }
  }
  return decode_wav(encode_wav(a));
}

fs::path temp_dir(const std::string& tag) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / ("rearrange_test_" + tag + "_" + std::to_string(::getpid()) +
                                                    "_" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<unsigned char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

}  // namespace rearrange::testing
