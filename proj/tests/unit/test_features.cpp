#include "fixtures.h"

#include "rearrange/error.h"
#include "rearrange/features.h"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <cstring>
#include <functional>

using namespace rearrange;
namespace fs = std::filesystem;

namespace {

FeatureMatrix frames(const std::vector<double>& times, const std::vector<std::vector<double>>& rows,
                     const std::string& name = "m") {
  FeatureMatrix m;
  m.name = name;
  m.axis = Axis::kFrames;
  m.frame_times = times;
  m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

FeatureMatrix random_frames(std::mt19937_64& rng, int n, int dims, double t0, double t1) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> tu(t0, t1);
  FeatureMatrix m;
  m.name = "r";
  m.axis = Axis::kFrames;
  for (int i = 0; i < n; ++i) m.frame_times.push_back(tu(rng));
  std::sort(m.frame_times.begin(), m.frame_times.end());
  m.values.resize(n, dims);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < dims; ++d) m.values(i, d) = static_cast<float>(u(rng));
  return m;
}

void write_json(const fs::path& p, const nlohmann::json& j) { std::ofstream(p) << j.dump(); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("beat_synchronize averages halves") {
  const auto m = frames({0.0, 0.25, 0.5, 0.75}, {{1}, {3}, {5}, {7}});
  BeatGrid g;
  g.beats = {0.0, 0.5};
  g.downbeats = {0.0};
  g.total_duration = 1.0;
  const auto b = beat_synchronize(m, g);
  CHECK(b.axis == Axis::kBeats);
  REQUIRE(b.rows() == 2);
  CHECK(b.values(0, 0) == 2.0);
  CHECK(b.values(1, 0) == 6.0);
}

TEST_CASE("beat_synchronize keeps constants constant and shapes fixed") {
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 40; ++i) {
    times.push_back(i * 0.1);
    rows.push_back({2.5, -1.0, 4.0});
  }
  const BeatGrid g = testing::uniform_grid(8);
  const auto b = beat_synchronize(frames(times, rows), g);
  CHECK(b.rows() == 8);
  CHECK(b.cols() == 3);
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    CHECK(b.values(i, 0) == doctest::Approx(2.5));
    CHECK(b.values(i, 1) == doctest::Approx(-1.0));
    CHECK(b.values(i, 2) == doctest::Approx(4.0));
  }
}

TEST_CASE("beat_synchronize matches brute-force interval means") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const BeatGrid g = testing::uniform_grid(20, 120.0, 4);
    const auto m = random_frames(rng, 200, 5, 0.0, g.total_duration);
    const auto b = beat_synchronize(m, g);
    for (std::size_t i = 0; i < 20; ++i) {
      const double lo = g.beats[i];
      const double hi = i + 1 < 20 ? g.beats[i + 1] : g.total_duration;
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(5);
      int count = 0;
      for (Eigen::Index f = 0; f < m.rows(); ++f) {
        const double t = m.frame_times[static_cast<std::size_t>(f)];
        if (t >= lo && (t < hi || (i == 19 && t <= hi))) {
          acc += m.values.row(f);
          ++count;
        }
      }
      if (count == 0) continue;
      acc /= count;
      for (Eigen::Index d = 0; d < 5; ++d) CHECK(b.values(static_cast<Eigen::Index>(i), d) == doctest::Approx(acc(d)).epsilon(1e-12));
    }
  }
}

TEST_CASE("beats without frames copy the nearest frame") {
  const auto m = frames({0.0, 1.0, 2.0}, {{1}, {2}, {3}});
  BeatGrid g;
  g.beats = {0.0, 1.0, 1.2, 1.4, 2.0};
  g.downbeats = {0.0};
  g.total_duration = 2.5;
  const auto b = beat_synchronize(m, g);
  CHECK(b.values(2, 0) == 2.0);  // [1.2, 1.4): midpoint 1.3 is nearest 1.0
}

TEST_CASE("feature containers round-trip at float precision") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    FeatureMatrix m = random_frames(rng, 17 + trial, 3 + trial % 4, 0.0, 5.0);
    const auto bytes = encode_feature_container(m);
    REQUIRE(bytes.size() == 4 + 4 + 4 + 1 + 8 * static_cast<std::size_t>(m.rows()) +
                                4 * static_cast<std::size_t>(m.rows() * m.cols()));
    CHECK(bytes[0] == 'F');
    CHECK(bytes[3] == '1');
    const FeatureMatrix back = decode_feature_container(bytes, "r");
    CHECK(back.frame_times == m.frame_times);
    CHECK(back.values == m.values);
    CHECK(encode_feature_container(back) == bytes);
  }
  FeatureMatrix beats;
  beats.axis = Axis::kBeats;
  beats.values = Matrix::Constant(3, 2, 0.5);
  const auto bytes = encode_feature_container(beats);
  CHECK(bytes.size() == 13 + 4 * 6);
  CHECK(decode_feature_container(bytes).axis == Axis::kBeats);
}

TEST_CASE("corrupt containers are rejected") {
  FeatureMatrix m = frames({0.0, 0.5}, {{1, 2}, {3, 4}});
  auto bytes = encode_feature_container(m);
  SUBCASE("magic") {
    bytes[0] = 'G';
    CHECK(kind_of([&] { decode_feature_container(bytes); }) == ErrorKind::kMalformedHeader);
  }
  SUBCASE("size") {
    bytes.pop_back();
    CHECK(kind_of([&] { decode_feature_container(bytes); }) == ErrorKind::kMalformedHeader);
  }
  SUBCASE("non-finite value") {
    const float nan = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(bytes.data() + bytes.size() - 4, &nan, 4);
    CHECK(kind_of([&] { decode_feature_container(bytes); }) == ErrorKind::kNonFinite);
  }
  SUBCASE("axis flag") {
    bytes[12] = 7;
    CHECK(kind_of([&] { decode_feature_container(bytes); }) == ErrorKind::kMalformedHeader);
  }
}

TEST_CASE("minimal manifest loads") {
  const auto dir = testing::temp_dir("manifest");
  write_feature_container(dir / "x.fea", frames({0.0, 0.3, 0.6, 0.9}, {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}, {1, 1, 1}}));
  write_json(dir / "manifest.json", {{"audio", "none.wav"},
                                     {"sample_rate", 22050},
                                     {"beats", {0.5, 1.0}},
                                     {"downbeats", {0.5}},
                                     {"beats_per_measure", 4},
                                     {"features", {{{"name", "repetition-embedding"}, {"path", "x.fea"}}}}});
  Diagnostics diag;
  const auto bundle = load_feature_bundle(dir / "manifest.json", &diag);
  CHECK(bundle.grid.size() == 2);
  REQUIRE(bundle.features.size() == 1);
  CHECK(bundle.features[0].rows() == 4);
  CHECK(bundle.features[0].cols() == 3);
  CHECK(bundle.find("repetition-embedding") != nullptr);
  CHECK(bundle.grid.total_duration == doctest::Approx(1.5));
  CHECK(diag.warnings.size() == 1);
}

TEST_CASE("manifest errors carry distinct kinds") {
  const auto dir = testing::temp_dir("manifest_err");
  write_feature_container(dir / "x.fea", frames({0.0, 0.5}, {{1}, {2}}));
  nlohmann::json base = {{"audio", "a.wav"},
                         {"sample_rate", 8000},
                         {"beats", {0.5, 1.0}},
                         {"downbeats", {0.5}},
                         {"beats_per_measure", 4},
                         {"total_duration", 2.0},
                         {"features", {{{"name", "x"}, {"path", "x.fea"}}}}};
  SUBCASE("missing manifest") {
    CHECK(kind_of([&] { load_feature_bundle(dir / "nope.json"); }) == ErrorKind::kMissingFile);
  }
  SUBCASE("missing container") {
    base["features"][0]["path"] = "gone.fea";
    write_json(dir / "m.json", base);
    CHECK(kind_of([&] { load_feature_bundle(dir / "m.json"); }) == ErrorKind::kMissingFile);
  }
  SUBCASE("downbeat not on beat grid") {
    base["downbeats"] = {0.7};
    write_json(dir / "m.json", base);
    CHECK(kind_of([&] { load_feature_bundle(dir / "m.json"); }) == ErrorKind::kBeatGridMismatch);
  }
  SUBCASE("malformed JSON") {
    std::ofstream(dir / "m.json") << "{ nope";
    CHECK(kind_of([&] { load_feature_bundle(dir / "m.json"); }) == ErrorKind::kMalformedHeader);
  }
  SUBCASE("wrong field type") {
    base["beats"] = "fast";
    write_json(dir / "m.json", base);
    CHECK(kind_of([&] { load_feature_bundle(dir / "m.json"); }) == ErrorKind::kMalformedHeader);
  }
  SUBCASE("duplicate feature") {
    base["features"].push_back({{"name", "x"}, {"path", "x.fea"}});
    write_json(dir / "m.json", base);
    CHECK(kind_of([&] { load_feature_bundle(dir / "m.json"); }) == ErrorKind::kMalformedHeader);
  }
}

TEST_CASE("bundle write/load round trip preserves container payloads") {
  testing::SongSpec spec;
  spec.form = "AB";
  spec.beats_per_section = 8;
  const auto song = testing::make_song(spec);
  const auto dir = testing::temp_dir("bundle");
  const auto manifest = testing::write_song(dir, song);
  Diagnostics diag;
  const auto loaded = load_feature_bundle(manifest, &diag);
  CHECK(diag.empty());
  CHECK(loaded.audio_path == dir / "audio.wav");
  const auto dir2 = testing::temp_dir("bundle2");
  write_bundle(dir2, loaded);
  for (const auto& f : loaded.features) {
    CHECK(testing::read_bytes(dir / (f.name + ".fea")) == testing::read_bytes(dir2 / (f.name + ".fea")));
  }
  CHECK(loaded.grid.beats == song.bundle.grid.beats);
}

TEST_CASE("fallback feature on silence is a constant floor") {
  AudioBuffer a;
  a.sample_rate = 22050;
  a.channels = 1;
  a.samples.assign(22050, 0.0f);
  const auto f = compute_fallback_repetition_feature(a);
  CHECK(f.rows() == 43);
  CHECK(f.cols() == 36);
  CHECK(f.values.allFinite());
  CHECK(f.values.maxCoeff() == f.values.minCoeff());
  CHECK(f.frame_times[1] == doctest::Approx(512.0 / 22050.0));
}

TEST_CASE("fallback feature peaks in the band holding a pure tone") {
  AudioBuffer a;
  a.sample_rate = 22050;
  a.channels = 1;
  for (int n = 0; n < 2 * 22050; ++n) a.samples.push_back(static_cast<float>(0.5 * std::sin(2 * std::numbers::pi * 440.0 * n / 22050.0)));
  const auto edges = fallback_band_edges();
  REQUIRE(edges.size() == 37);
  CHECK(edges.front() == doctest::Approx(32.7));
  CHECK(edges.back() == doctest::Approx(8000.0));
  Eigen::Index band = 0;
  while (!(edges[static_cast<std::size_t>(band)] <= 440.0 && 440.0 < edges[static_cast<std::size_t>(band) + 1])) ++band;
  const auto f = compute_fallback_repetition_feature(a);
  for (Eigen::Index r = 0; r < f.rows(); ++r) {
    Eigen::Index arg = 0;
    f.values.row(r).maxCoeff(&arg);
    CHECK(arg == band);
  }
}

TEST_CASE("fallback feature of a doubled signal starts with the single signal's frames") {
  const AudioBuffer a = testing::tone_audio(1.5, 16000);
  AudioBuffer aa = a;
  aa.samples.insert(aa.samples.end(), a.samples.begin(), a.samples.end());
  const auto fa = compute_fallback_repetition_feature(a);
  const auto faa = compute_fallback_repetition_feature(aa);
  const int half = fallback_fft_size(16000) / 2;
  int compared = 0;
  for (Eigen::Index r = 0; r < fa.rows(); ++r) {
    if (r * 512 + half >= static_cast<Eigen::Index>(a.samples.size())) break;
    for (Eigen::Index c = 0; c < fa.cols(); ++c) CHECK(faa.values(r, c) == fa.values(r, c));
    ++compared;
  }
  CHECK(compared > 10);
  CHECK(compute_fallback_repetition_feature(a).values == fa.values);
}

TEST_CASE("fallback feature averages stereo and validates its input") {
  const AudioBuffer st = testing::tone_audio(1.2, 16000, 2);
  AudioBuffer mono;
  mono.sample_rate = 16000;
  mono.channels = 1;
  const auto m = st.mono();
  mono.samples = m;
  CHECK(compute_fallback_repetition_feature(st).values == compute_fallback_repetition_feature(mono).values);

  AudioBuffer empty;
  empty.sample_rate = 16000;
  empty.channels = 1;
  CHECK_THROWS_AS(compute_fallback_repetition_feature(empty), Error);
  AudioBuffer low = testing::tone_audio(1.2, 4000);
  CHECK_THROWS_AS(compute_fallback_repetition_feature(low), Error);
}
