#include "rearrange/artifacts.h"

#include <json.hpp>

#include <fstream>
#include <iterator>

namespace rearrange {

using nlohmann::json;

namespace {

constexpr const char* kToolName = "rearrange";
constexpr const char* kFormatVersion = "1";

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::kMalformedHeader, what);
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    malformed(what + " is not valid JSON: " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) malformed(what + " lacks '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    malformed(what + " has a bad '" + key + "'");
  }
}

json config_to_json(const PipelineConfig& c) {
  json j;
  j["k_max"] = c.k_max;
  j["k_nn"] = c.k_nn ? json(*c.k_nn) : json(nullptr);
  j["weights"] = {c.weights.repetition_x, c.weights.repetition_y, c.weights.sequence_z};
  j["radius_measures"] = c.radius_measures;
  j["internal_levels"] = c.internal_levels;
  j["min_run_measures"] = c.min_run_measures;
  j["crossfade_ms"] = c.crossfade_ms;
  j["min_segment_sec"] = c.min_segment_sec ? json(*c.min_segment_sec) : json(nullptr);
  j["seed"] = c.seed;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  const std::string what = "config header";
  PipelineConfig c;
  c.k_max = field<int>(j, "k_max", what);
  if (j.contains("k_nn") && !j["k_nn"].is_null()) c.k_nn = field<int>(j, "k_nn", what);
  const auto w = field<std::vector<double>>(j, "weights", what);
  if (w.size() != 3) malformed("config weights must have 3 entries");
  c.weights = CombineWeights{w[0], w[1], w[2]};
  c.radius_measures = field<int>(j, "radius_measures", what);
  c.internal_levels = field<std::vector<int>>(j, "internal_levels", what);
  c.min_run_measures = field<int>(j, "min_run_measures", what);
  c.crossfade_ms = field<int>(j, "crossfade_ms", what);
  if (j.contains("min_segment_sec") && !j["min_segment_sec"].is_null()) {
    c.min_segment_sec = field<double>(j, "min_segment_sec", what);
  }
  c.seed = field<std::uint64_t>(j, "seed", what);
  return c;
}

json header(const PipelineConfig& config) {
  return {{"tool", kToolName}, {"format", kFormatVersion}, {"seed", config.seed}, {"config", config_to_json(config)}};
}

json grid_to_json(const BeatGrid& g) {
  return {{"beats", g.beats},
          {"downbeats", g.downbeats},
          {"beats_per_measure", g.beats_per_measure},
          {"sample_rate", g.sample_rate},
          {"total_duration", g.total_duration}};
}

BeatGrid grid_from_json(const json& j) {
  const std::string what = "grid";
  BeatGrid g;
  g.beats = field<std::vector<double>>(j, "beats", what);
  g.downbeats = field<std::vector<double>>(j, "downbeats", what);
  g.beats_per_measure = field<int>(j, "beats_per_measure", what);
  g.sample_rate = field<int>(j, "sample_rate", what);
  g.total_duration = field<double>(j, "total_duration", what);
  g.validate();
  return g;
}

json segments_json(const std::vector<Segment>& segments, const BeatGrid& grid) {
  json arr = json::array();
  for (const auto& s : segments) {
    arr.push_back({{"level", s.level},
                   {"label", s.label},
                   {"start_beat", s.start_beat},
                   {"end_beat", s.end_beat},
                   {"start_sec", grid.beat_start(s.start_beat)},
                   {"end_sec", grid.beat_end(s.end_beat - 1)}});
  }
  return arr;
}

std::vector<Segment> segments_from(const json& arr) {
  if (!arr.is_array()) malformed("segments must be an array");
  std::vector<Segment> out;
  for (const auto& e : arr) {
    Segment s;
    s.level = field<int>(e, "level", "segment");
    s.label = field<int>(e, "label", "segment");
    s.start_beat = field<std::size_t>(e, "start_beat", "segment");
    s.end_beat = field<std::size_t>(e, "end_beat", "segment");
    if (s.end_beat <= s.start_beat) malformed("segment with end_beat <= start_beat");
    out.push_back(s);
  }
  return out;
}

json transitions_json(const std::vector<TransitionPoint>& transitions) {
  json arr = json::array();
  for (const auto& t : transitions) {
    arr.push_back({{"exit_beat", t.exit_beat},
                   {"entry_beat", t.entry_beat},
                   {"cost", t.cost},
                   {"kind", to_string(t.kind)},
                   {"diag_len", t.diagonal_length}});
  }
  return arr;
}

std::vector<TransitionPoint> transitions_from(const json& arr) {
  if (!arr.is_array()) malformed("transitions must be an array");
  std::vector<TransitionPoint> out;
  for (const auto& e : arr) {
    TransitionPoint t;
    t.exit_beat = field<std::size_t>(e, "exit_beat", "transition");
    t.entry_beat = field<std::size_t>(e, "entry_beat", "transition");
    t.cost = field<double>(e, "cost", "transition");
    const auto kind = transition_kind_from_string(field<std::string>(e, "kind", "transition"));
    if (!kind) malformed("transition has an unknown kind");
    t.kind = *kind;
    t.diagonal_length = field<std::size_t>(e, "diag_len", "transition");
    if (!(t.cost > 0.0 && t.cost <= 1.0)) malformed("transition cost outside (0, 1]");
    out.push_back(t);
  }
  return out;
}

json path_json(const BeatPath& p) {
  json jumps = json::array();
  for (const auto& j : p.jumps) {
    jumps.push_back({{"after_beat", p.beats[j.position]},
                     {"to_beat", p.beats[j.position + 1]},
                     {"cost", j.transition.cost},
                     {"kind", to_string(j.transition.kind)}});
  }
  return {{"beats", p.beats}, {"cost", p.total_cost}, {"duration_sec", p.realized_duration}, {"jumps", jumps}};
}

json plan_json(const SplicePlan& plan) {
  json spans = json::array();
  for (const auto& s : plan.spans) spans.push_back({{"start", s.source_start}, {"end", s.source_end}});
  return {{"spans", spans}, {"jump_costs", plan.jump_costs}, {"crossfade_ms", plan.crossfade_ms}};
}

SplicePlan plan_from(const json& j) {
  SplicePlan plan;
  const std::string what = "splice plan";
  const json spans = field<json>(j, "spans", what);
  if (!spans.is_array() || spans.empty()) malformed("splice plan needs a non-empty span array");
  for (const auto& s : spans) {
    Span span{field<double>(s, "start", "span"), field<double>(s, "end", "span")};
    if (!(span.source_end > span.source_start)) malformed("span with end <= start");
    plan.spans.push_back(span);
  }
  plan.jump_costs = field<std::vector<double>>(j, "jump_costs", what);
  plan.crossfade_ms = field<double>(j, "crossfade_ms", what);
  return plan;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string segments_to_json(const std::vector<Segment>& segments, const BeatGrid& grid) {
  return dump(segments_json(segments, grid));
}
std::vector<Segment> parse_segments(const std::string& text) {
  return segments_from(parse_json(text, "segments"));
}
std::string transitions_to_json(const std::vector<TransitionPoint>& transitions) {
  return dump(transitions_json(transitions));
}
std::vector<TransitionPoint> parse_transitions(const std::string& text) {
  return transitions_from(parse_json(text, "transitions"));
}
std::string path_to_json(const BeatPath& path) { return dump(path_json(path)); }
std::string splice_plan_to_json(const SplicePlan& plan) { return dump(plan_json(plan)); }
SplicePlan parse_splice_plan(const std::string& text) { return plan_from(parse_json(text, "splice plan")); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingFile, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

std::vector<std::filesystem::path> write_analysis_artifacts(const std::filesystem::path& dir,
                                                            const AnalysisResult& result,
                                                            const PipelineConfig& config,
                                                            const std::string& audio) {
  std::filesystem::create_directories(dir);
  json hierarchy;
  hierarchy["header"] = header(config);
  hierarchy["audio"] = audio;
  hierarchy["grid"] = grid_to_json(result.grid);
  hierarchy["k_nn"] = result.k_nn;
  const auto levels = result.hierarchy.levels.size();
  hierarchy["eigenvalues"] = std::vector<double>(
      result.hierarchy.eigenvalues.begin(),
      result.hierarchy.eigenvalues.begin() + static_cast<std::ptrdiff_t>(std::min(levels, result.hierarchy.eigenvalues.size())));
  hierarchy["segments"] = segments_json(result.segments, result.grid);

  json transitions;
  transitions["header"] = header(config);
  transitions["transitions"] = transitions_json(result.transitions);

  const auto h_path = dir / kHierarchyFile;
  const auto t_path = dir / kTransitionsFile;
  write_text_file(h_path, dump(hierarchy));
  write_text_file(t_path, dump(transitions));
  return {h_path, t_path};
}

AnalysisArtifacts read_analysis_artifacts(const std::filesystem::path& dir) {
  const json hierarchy = parse_json(read_text_file(dir / kHierarchyFile), kHierarchyFile);
  const json transitions = parse_json(read_text_file(dir / kTransitionsFile), kTransitionsFile);
  AnalysisArtifacts a;
  a.config = config_from_json(field<json>(field<json>(hierarchy, "header", kHierarchyFile), "config", kHierarchyFile));
  a.grid = grid_from_json(field<json>(hierarchy, "grid", kHierarchyFile));
  a.audio = field<std::string>(hierarchy, "audio", kHierarchyFile);
  a.segments = segments_from(field<json>(hierarchy, "segments", kHierarchyFile));
  a.transitions = transitions_from(field<json>(transitions, "transitions", kTransitionsFile));
  return a;
}

std::filesystem::path write_plan_artifact(const std::filesystem::path& path, const PlanArtifact& artifact) {
  json j;
  j["header"] = header(artifact.config);
  j["header"]["target_seconds"] = artifact.target_seconds;
  j["audio"] = artifact.audio;
  j["path"] = path_json(artifact.path);
  j["splice"] = plan_json(artifact.plan);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_text_file(path, dump(j));
  return path;
}

PlanArtifact read_plan_artifact(const std::filesystem::path& path) {
  const json j = parse_json(read_text_file(path), path.filename().string());
  PlanArtifact a;
  const json h = field<json>(j, "header", "plan");
  a.config = config_from_json(field<json>(h, "config", "plan header"));
  a.target_seconds = field<double>(h, "target_seconds", "plan header");
  a.audio = field<std::string>(j, "audio", "plan");
  a.plan = plan_from(field<json>(j, "splice", "plan"));
  const json p = field<json>(j, "path", "plan");
  a.path.beats = field<std::vector<std::size_t>>(p, "beats", "path");
  a.path.total_cost = field<double>(p, "cost", "path");
  a.path.realized_duration = field<double>(p, "duration_sec", "path");
  return a;
}

}  // namespace rearrange
