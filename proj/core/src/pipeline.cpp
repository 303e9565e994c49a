#include "rearrange/pipeline.h"

#include <algorithm>
#include <sstream>

namespace rearrange {

const char* to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::kFeatures: return "features";
    case Stage::kRecurrence: return "recurrence";
    case Stage::kSegmentation: return "segmentation";
    case Stage::kTransitions: return "transitions";
    case Stage::kPlan: return "plan";
    case Stage::kRender: return "render";
  }
  return "unknown";
}

StageError::StageError(Stage stage, const Error& cause)
    : Error(cause.kind(), std::string(to_string(stage)) + ": " + cause.what()), stage_(stage) {}

void PipelineConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kInvalidArgument, msg); };
  if (k_max < 1) fail("k_max must be >= 1");
  if (k_nn && *k_nn < 1) fail("k_nn must be >= 1");
  weights.validate();
  if (radius_measures < 1) fail("radius must be >= 1 measure");
  if (min_run_measures < 1) fail("min_run_measures must be >= 1");
  if (internal_levels.empty() ||
      std::any_of(internal_levels.begin(), internal_levels.end(), [](int k) { return k < 1; })) {
    fail("internal levels must be positive");
  }
  if (crossfade_ms < 0 || crossfade_ms > 200) fail("crossfade must lie in [0, 200] ms");
  if (min_segment_sec && !(*min_segment_sec > 0.0)) fail("min_segment_sec must be positive");
}

SegmentationOptions PipelineConfig::segmentation_options() const {
  SegmentationOptions o;
  o.k_max = k_max;
  o.seed = seed;
  o.min_segment_sec = min_segment_sec;
  return o;
}

TransitionOptions PipelineConfig::transition_options() const {
  TransitionOptions o;
  o.radius_measures = radius_measures;
  o.min_run_measures = min_run_measures;
  o.internal_levels = internal_levels;
  return o;
}

namespace {

FeatureMatrix to_beats(const FeatureMatrix& m, const BeatGrid& grid) {
  if (m.axis == Axis::kFrames) return beat_synchronize(m, grid);
  m.validate();
  if (static_cast<std::size_t>(m.rows()) != grid.size()) {
    throw Error(ErrorKind::kBeatGridMismatch,
                "beat-synchronous feature '" + m.name + "' has " + std::to_string(m.rows()) +
                    " rows for " + std::to_string(grid.size()) + " beats");
  }
  return m;
}

const FeatureMatrix& require(const FeatureBundle& bundle, const char* name) {
  const FeatureMatrix* m = bundle.find(name);
  if (m == nullptr) throw Error(ErrorKind::kMissingFile, std::string("bundle lacks feature '") + name + "'");
  return *m;
}

template <typename F>
auto staged(Stage stage, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

}  // namespace

BeatFeatures prepare_beat_features(const FeatureBundle& bundle, Diagnostics* diag) {
  BeatFeatures out;
  out.repetition_x = to_beats(require(bundle, feature_names::kRepetitionEmbedding), bundle.grid);
  if (const FeatureMatrix* cqt = bundle.find(feature_names::kRepetitionCqt)) {
    out.repetition_y = to_beats(*cqt, bundle.grid);
  } else {
    if (bundle.audio.empty()) {
      throw Error(ErrorKind::kMissingFile, "bundle lacks repetition-cqt and has no audio for the fallback");
    }
    warn(diag, "no repetition-cqt in bundle; computing spectral fallback from audio");
    out.repetition_y = beat_synchronize(compute_fallback_repetition_feature(read_wav(bundle.audio_path)),
                                        bundle.grid);
  }
  out.homogeneity_z = to_beats(require(bundle, feature_names::kHomogeneityEmbedding), bundle.grid);
  return out;
}

AnalysisResult run_analysis(const FeatureBundle& bundle, const PipelineConfig& config, Diagnostics* diag) {
  config.validate();
  AnalysisResult result;
  result.grid = bundle.grid;
  const BeatGrid& grid = result.grid;
  const auto n = static_cast<Eigen::Index>(grid.size());

  const BeatFeatures beat = staged(Stage::kFeatures, [&] {
    grid.validate();
    return prepare_beat_features(bundle, diag);
  });

  result.k_nn = config.k_nn.value_or(default_knn(n));
  result.recurrence = staged(Stage::kRecurrence, [&] {
    const auto rx = build_repetition_recurrence(beat.repetition_x, result.k_nn, diag);
    const auto ry = build_repetition_recurrence(beat.repetition_y, result.k_nn, diag);
    const auto sz = build_sequence_matrix(beat.homogeneity_z, diag);
    return combine(rx, ry, sz, config.weights);
  });

  result.hierarchy = staged(Stage::kSegmentation, [&] {
    SegmentationOptions options = config.segmentation_options();
    if (options.k_max > n) {
      std::ostringstream os;
      os << "k_max " << options.k_max << " exceeds beat count; using " << n;
      warn(diag, os.str());
      options.k_max = static_cast<int>(n);
    }
    const Matrix laplacian = normalized_laplacian(result.recurrence);
    return quantize_to_downbeats(segment_levels(laplacian, grid, options, diag), grid);
  });
  result.segments = collect_global_segments(result.hierarchy);

  result.transitions = staged(Stage::kTransitions, [&] {
    return build_transition_set(result.hierarchy, result.recurrence, grid, config.transition_options());
  });
  return result;
}

}  // namespace rearrange
