/// @file artifacts.h
/// @brief JSON forms of segments, transitions, paths and splice plans, and
/// the persisted analysis/plan artifacts built from them.

#pragma once

#include "rearrange/pathfinder.h"
#include "rearrange/pipeline.h"
#include "rearrange/render.h"

#include <filesystem>
#include <string>
#include <vector>

namespace rearrange {

// Module export formats. Each *_to_json returns indented JSON
// text; parse_* throw Error(kMalformedHeader) on schema violations.
std::string segments_to_json(const std::vector<Segment>& segments, const BeatGrid& grid);
std::vector<Segment> parse_segments(const std::string& text);
std::string transitions_to_json(const std::vector<TransitionPoint>& transitions);
std::vector<TransitionPoint> parse_transitions(const std::string& text);
std::string path_to_json(const BeatPath& path);
std::string splice_plan_to_json(const SplicePlan& plan);
SplicePlan parse_splice_plan(const std::string& text);

inline constexpr const char* kHierarchyFile = "hierarchy.json";
inline constexpr const char* kTransitionsFile = "transitions.json";
inline constexpr const char* kPlanFile = "plan.json";

/// What the plan stage needs from a prior analysis run.
struct AnalysisArtifacts {
  PipelineConfig config;
  BeatGrid grid;
  std::string audio;
  std::vector<Segment> segments;
  std::vector<TransitionPoint> transitions;
};

/// Writes hierarchy.json and transitions.json into dir; both carry the
/// config and seed in a header object. Returns the two paths.
std::vector<std::filesystem::path> write_analysis_artifacts(const std::filesystem::path& dir,
                                                            const AnalysisResult& result,
                                                            const PipelineConfig& config,
                                                            const std::string& audio);
AnalysisArtifacts read_analysis_artifacts(const std::filesystem::path& dir);

struct PlanArtifact {
  PipelineConfig config;
  double target_seconds = 0.0;
  std::string audio;
  BeatPath path;
  SplicePlan plan;
};

std::filesystem::path write_plan_artifact(const std::filesystem::path& path,
                                          const PlanArtifact& artifact);
/// Reads the splice plan (and the audio reference) back from plan.json.
PlanArtifact read_plan_artifact(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace rearrange
