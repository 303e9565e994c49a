#include "rearrange_cli/commands.h"

#include "rearrange/artifacts.h"
#include "rearrange/audio.h"
#include "rearrange/error.h"
#include "rearrange/features.h"
#include "rearrange/pathfinder.h"
#include "rearrange/pipeline.h"
#include "rearrange/render.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>

namespace rearrange::cli {

namespace fs = std::filesystem;

namespace {

struct AnalyzeArgs {
  std::string manifest;
  std::string out_dir = ".";
  int k_max = 12;
  std::optional<int> k_nn;
  int radius = 4;
  std::optional<double> min_segment_sec;
  std::uint64_t seed = 0;
};

struct PlanArgs {
  std::string out_dir = ".";
  double target_seconds = 0.0;
  std::optional<int> crossfade_ms;
  std::string plan;
};

struct RenderArgs {
  std::string plan;
  std::string audio;
  std::string out;
};

void print_diagnostics(const Diagnostics& diag, std::ostream& err) {
  for (const auto& w : diag.warnings) err << "warning: " << w << "\n";
}

int analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  PipelineConfig config;
  config.k_max = a.k_max;
  config.k_nn = a.k_nn;
  config.radius_measures = a.radius;
  config.min_segment_sec = a.min_segment_sec;
  config.seed = a.seed;
  config.validate();

  Diagnostics diag;
  FeatureBundle bundle;
  try {
    bundle = load_feature_bundle(a.manifest, &diag);
  } catch (const Error& e) {
    throw StageError(Stage::kFeatures, e);
  }
  const AnalysisResult result = run_analysis(bundle, config, &diag);
  print_diagnostics(diag, err);

  const auto audio = bundle.audio.empty() ? std::string() : fs::absolute(bundle.audio_path).lexically_normal().string();
  const auto paths = write_analysis_artifacts(a.out_dir, result, config, audio);

  std::map<TransitionKind, std::size_t> counts;
  for (const auto& t : result.transitions) ++counts[t.kind];
  out << "beats: " << result.grid.size() << " (k_nn " << result.k_nn << ")\n";
  out << "levels: " << result.hierarchy.levels.size() << "\n";
  for (const auto& [level, segs] : result.hierarchy.levels) {
    out << "  level " << level << ": " << segs.size() << " segments\n";
  }
  out << "transitions: " << result.transitions.size() << " (segment "
      << counts[TransitionKind::kSegment] << ", internal " << counts[TransitionKind::kInternal]
      << ", fallback " << counts[TransitionKind::kBoundaryFallback] << ")\n";
  for (const auto& p : paths) out << "wrote " << p.string() << "\n";
  return kExitOk;
}

int plan(const PlanArgs& a, std::ostream& out, std::ostream&) {
  if (!(a.target_seconds > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "--target-seconds must be positive");
  }
  const AnalysisArtifacts analysis = read_analysis_artifacts(a.out_dir);
  PlanArtifact artifact;
  artifact.config = analysis.config;
  if (a.crossfade_ms) artifact.config.crossfade_ms = *a.crossfade_ms;
  artifact.config.validate();
  artifact.target_seconds = a.target_seconds;
  artifact.audio = analysis.audio;

  try {
    artifact.path = solve(analysis.grid, analysis.transitions, a.target_seconds);
  } catch (const Error& e) {
    throw StageError(Stage::kPlan, e);
  }
  const auto report = validate_path(artifact.path, analysis.grid, analysis.transitions, a.target_seconds);
  if (!report.ok()) {
    std::string msg = "solver produced an invalid path";
    for (const auto& m : report.messages) msg += "; " + m;
    throw StageError(Stage::kPlan, Error(ErrorKind::kNumerical, msg));
  }
  artifact.plan = compress_path(artifact.path, analysis.grid, artifact.config.crossfade_ms);

  const fs::path plan_path = a.plan.empty() ? fs::path(a.out_dir) / kPlanFile : fs::path(a.plan);
  write_plan_artifact(plan_path, artifact);
  out << std::setprecision(6) << std::fixed;
  out << "cost: " << artifact.path.total_cost << "\n";
  out << "duration: " << artifact.path.realized_duration << " s (target " << a.target_seconds << " s)\n";
  out << "jumps: " << artifact.path.jumps.size() << "\n";
  out << "wrote " << plan_path.string() << "\n";
  return kExitOk;
}

int render(const RenderArgs& a, std::ostream& out, std::ostream&) {
  const PlanArtifact artifact = read_plan_artifact(a.plan);
  const std::string audio_path = a.audio.empty() ? artifact.audio : a.audio;
  if (audio_path.empty()) throw Error(ErrorKind::kInvalidArgument, "no audio given and plan names none");
  const AudioBuffer audio = read_wav(audio_path);
  AudioBuffer rendered;
  try {
    rendered = render_audio(artifact.plan, audio);
  } catch (const Error& e) {
    throw StageError(Stage::kRender, e);
  }
  write_wav(a.out, rendered);
  out << std::setprecision(6) << std::fixed;
  out << "frames: " << rendered.frames() << "\n";
  out << "duration: " << rendered.duration() << " s\n";
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Beat-aligned structural rearrangement of music recordings"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Segment a feature bundle and find transition points");
  analyze_cmd->add_option("--manifest", analyze_args.manifest, "Feature bundle manifest")->required();
  analyze_cmd->add_option("--out-dir", analyze_args.out_dir, "Directory for hierarchy.json and transitions.json");
  analyze_cmd->add_option("--k-max", analyze_args.k_max, "Finest segmentation level");
  analyze_cmd->add_option("--knn", analyze_args.k_nn, "Neighbours in the recurrence graph");
  analyze_cmd->add_option("--radius", analyze_args.radius, "Transition search radius in measures");
  analyze_cmd->add_option("--min-segment-sec", analyze_args.min_segment_sec,
                          "Stop refining once a segment is this short");
  analyze_cmd->add_option("--seed", analyze_args.seed, "Clustering seed");

  PlanArgs plan_args;
  auto* plan_cmd = app.add_subcommand("plan", "Find the cheapest beat path for a target duration");
  plan_cmd->add_option("--out-dir", plan_args.out_dir, "Directory holding the analysis artifacts");
  plan_cmd->add_option("--target-seconds", plan_args.target_seconds, "Target duration")->required();
  plan_cmd->add_option("--crossfade-ms", plan_args.crossfade_ms, "Crossfade length at each jump");
  plan_cmd->add_option("--plan", plan_args.plan, "Output plan path (default <out-dir>/plan.json)");

  RenderArgs render_args;
  auto* render_cmd = app.add_subcommand("render", "Render a splice plan to WAV");
  render_cmd->add_option("--plan", render_args.plan, "Plan JSON")->required();
  render_cmd->add_option("--audio", render_args.audio, "Source WAV (default: the one named in the plan)");
  render_cmd->add_option("--out", render_args.out, "Output WAV")->required();

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (analyze_cmd->parsed()) return analyze(analyze_args, out, err);
    if (plan_cmd->parsed()) return plan(plan_args, out, err);
    return render(render_args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.kind() == ErrorKind::kInfeasible) {
      err << "no path of admissible length reaches the target within one measure;"
             " try a longer target or a larger search radius\n";
      return kExitInfeasible;
    }
    return kExitInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace rearrange::cli
