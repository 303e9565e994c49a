/// @file pipeline.h
/// @brief End-to-end analysis: features -> recurrence -> segmentation ->
/// transitions.

#pragma once

#include "rearrange/error.h"
#include "rearrange/features.h"
#include "rearrange/recurrence.h"
#include "rearrange/segmentation.h"
#include "rearrange/transitions.h"

#include <cstdint>
#include <optional>
#include <vector>

namespace rearrange {

struct PipelineConfig {
  int k_max = 12;
  std::optional<int> k_nn;
  CombineWeights weights;
  int radius_measures = 4;
  std::vector<int> internal_levels{4, 5, 6};
  int min_run_measures = 1;
  int crossfade_ms = 50;
  std::optional<double> min_segment_sec;
  std::uint64_t seed = 0;

  /// Throws Error(kInvalidArgument) on out-of-range settings.
  void validate() const;

  SegmentationOptions segmentation_options() const;
  TransitionOptions transition_options() const;
};

struct AnalysisResult {
  BeatGrid grid;
  RecurrenceMatrix recurrence;
  SegmentationHierarchy hierarchy;
  std::vector<Segment> segments;
  std::vector<TransitionPoint> transitions;
  int k_nn = 0;
};

/// Pipeline stage names used to attribute failures.
enum class Stage { kFeatures, kRecurrence, kSegmentation, kTransitions, kPlan, kRender };
const char* to_string(Stage stage) noexcept;

/// Error raised by run_analysis with the failing stage attached.
class StageError : public Error {
 public:
  StageError(Stage stage, const Error& cause);
  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

/// Beat-synchronized features in the roles the recurrence stage expects.
struct BeatFeatures {
  FeatureMatrix repetition_x;
  FeatureMatrix repetition_y;
  FeatureMatrix homogeneity_z;
};

/// Picks the three feature roles from a bundle (computing the spectral
/// fallback when no repetition-cqt is present) and beat-synchronizes them.
BeatFeatures prepare_beat_features(const FeatureBundle& bundle, Diagnostics* diag = nullptr);

AnalysisResult run_analysis(const FeatureBundle& bundle, const PipelineConfig& config,
                            Diagnostics* diag = nullptr);

}  // namespace rearrange
