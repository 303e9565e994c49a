#include "rearrange/features.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace rearrange {

using nlohmann::json;

const FeatureMatrix* FeatureBundle::find(const std::string& name) const {
  for (const auto& f : features) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

namespace {

std::vector<double> number_list(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw Error(ErrorKind::kMalformedHeader, std::string("manifest field '") + key + "' must be an array");
  }
  std::vector<double> out;
  out.reserve(j[key].size());
  for (const auto& v : j[key]) {
    if (!v.is_number()) {
      throw Error(ErrorKind::kMalformedHeader, std::string("manifest field '") + key + "' holds a non-number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw Error(ErrorKind::kNonFinite, std::string("non-finite value in '") + key + "'");
    out.push_back(d);
  }
  return out;
}

int positive_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 1) {
    throw Error(ErrorKind::kMalformedHeader, std::string("manifest field '") + key + "' must be a positive integer");
  }
  return j[key].get<int>();
}

}  // namespace

FeatureBundle load_feature_bundle(const std::filesystem::path& manifest_path, Diagnostics* diag) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorKind::kMissingFile, "cannot open manifest " + manifest_path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformedHeader, "manifest is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw Error(ErrorKind::kMalformedHeader, "manifest must be a JSON object");

  const std::filesystem::path base = manifest_path.parent_path();
  FeatureBundle bundle;
  if (j.contains("audio")) {
    if (!j["audio"].is_string()) throw Error(ErrorKind::kMalformedHeader, "manifest field 'audio' must be a string");
    bundle.audio = j["audio"].get<std::string>();
    bundle.audio_path = base / bundle.audio;
  }

  BeatGrid& grid = bundle.grid;
  grid.sample_rate = positive_int(j, "sample_rate");
  grid.beats_per_measure = positive_int(j, "beats_per_measure");
  grid.beats = number_list(j, "beats");
  grid.downbeats = number_list(j, "downbeats");

  if (j.contains("total_duration")) {
    if (!j["total_duration"].is_number()) {
      throw Error(ErrorKind::kMalformedHeader, "manifest field 'total_duration' must be a number");
    }
    grid.total_duration = j["total_duration"].get<double>();
  } else if (!bundle.audio.empty() && std::filesystem::exists(bundle.audio_path)) {
    const WavInfo info = read_wav_info(bundle.audio_path);
    grid.total_duration = static_cast<double>(info.frames) / info.sample_rate;
  } else if (grid.beats.size() >= 2) {
    grid.total_duration = grid.beats.back() + grid.median_beat_duration();
    warn(diag, "manifest has no total_duration and no readable audio; using last beat + median beat");
  }
  grid.validate();

  if (!j.contains("features") || !j["features"].is_array()) {
    throw Error(ErrorKind::kMalformedHeader, "manifest field 'features' must be an array");
  }
  for (const auto& entry : j["features"]) {
    if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string() ||
        !entry.contains("path") || !entry["path"].is_string()) {
      throw Error(ErrorKind::kMalformedHeader, "feature entries need string 'name' and 'path'");
    }
    const auto name = entry["name"].get<std::string>();
    if (bundle.find(name) != nullptr) {
      throw Error(ErrorKind::kMalformedHeader, "duplicate feature '" + name + "'");
    }
    bundle.features.push_back(read_feature_container(base / entry["path"].get<std::string>(), name));
  }
  return bundle;
}

std::filesystem::path write_bundle(const std::filesystem::path& dir, const FeatureBundle& bundle) {
  std::filesystem::create_directories(dir);
  json j;
  j["audio"] = bundle.audio;
  j["sample_rate"] = bundle.grid.sample_rate;
  j["beats"] = bundle.grid.beats;
  j["downbeats"] = bundle.grid.downbeats;
  j["beats_per_measure"] = bundle.grid.beats_per_measure;
  j["total_duration"] = bundle.grid.total_duration;
  j["features"] = json::array();
  for (const auto& f : bundle.features) {
    const std::string file = f.name + ".fea";
    write_feature_container(dir / file, f);
    j["features"].push_back({{"name", f.name}, {"path", file}});
  }
  const auto manifest = dir / "manifest.json";
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + manifest.string());
  out << j.dump(2) << '\n';
  return manifest;
}

FeatureMatrix beat_synchronize(const FeatureMatrix& m, const BeatGrid& grid) {
  if (m.axis != Axis::kFrames) {
    throw Error(ErrorKind::kInvalidArgument, "beat_synchronize expects a frame-axis matrix");
  }
  m.validate();
  const std::size_t n_beats = grid.size();
  const auto n_frames = static_cast<std::size_t>(m.rows());
  const auto& times = m.frame_times;

  FeatureMatrix out;
  out.name = m.name;
  out.axis = Axis::kBeats;
  out.values = Matrix::Zero(static_cast<Eigen::Index>(n_beats), m.cols());

  for (std::size_t b = 0; b < n_beats; ++b) {
    const double lo = grid.beats[b];
    const bool last = b + 1 == n_beats;
    const double hi = last ? std::max(grid.total_duration, lo) : grid.beats[b + 1];
    const auto first = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), lo) - times.begin());
    std::size_t end = first;
    while (end < n_frames && (times[end] < hi || (last && times[end] <= hi))) ++end;

    auto row = out.values.row(static_cast<Eigen::Index>(b));
    if (end > first) {
      for (std::size_t f = first; f < end; ++f) row += m.values.row(static_cast<Eigen::Index>(f));
      row /= static_cast<double>(end - first);
    } else {
      // No frame inside the interval: copy the frame nearest its midpoint.
      const double mid = 0.5 * (lo + hi);
      auto it = std::lower_bound(times.begin(), times.end(), mid);
      std::size_t nearest;
      if (it == times.end()) {
        nearest = n_frames - 1;
      } else if (it == times.begin()) {
        nearest = 0;
      } else {
        const auto right = static_cast<std::size_t>(it - times.begin());
        nearest = (mid - times[right - 1] <= times[right] - mid) ? right - 1 : right;
      }
      row = m.values.row(static_cast<Eigen::Index>(nearest));
    }
  }
  return out;
}

}  // namespace rearrange
