/// @file recurrence.h
/// @brief Beat-level recurrence graphs and their weighted combination.

#pragma once

#include "rearrange/error.h"
#include "rearrange/feature_matrix.h"

#include <filesystem>

namespace rearrange {

enum class RecurrenceKind { kRepetition, kSequence, kCombined };

const char* to_string(RecurrenceKind kind) noexcept;

/// Symmetric beat-by-beat affinity matrix with entries in [0, 1].
struct RecurrenceMatrix {
  Matrix values;
  RecurrenceKind kind = RecurrenceKind::kRepetition;
  /// Kernel bandwidth: the median k-th neighbour distance for repetition
  /// graphs, the median successive distance for sequence matrices, 0 for
  /// combined matrices.
  double bandwidth = 0.0;

  Eigen::Index size() const noexcept { return values.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values(i, j); }
};

struct CombineWeights {
  double repetition_x = 0.25;
  double repetition_y = 0.25;
  double sequence_z = 0.5;

  /// Throws Error(kInvalidArgument) unless all weights are nonnegative and
  /// sum to 1.
  void validate() const;
};

/// ceil(2 * sqrt(n)), clamped to [1, n - 1].
int default_knn(Eigen::Index n);

/// Mutual k-nearest-neighbour graph with weights exp(-d(i, j) / mu), where
/// mu is the median over beats of the distance to the k-th nearest
/// neighbour. Neighbour ties are broken by lower beat index. A zero mu falls
/// back to 1 with a warning.
RecurrenceMatrix build_repetition_recurrence(const FeatureMatrix& feat, int k_nn,
                                             Diagnostics* diag = nullptr);

/// Links each beat to its immediate neighbours with weight
/// exp(-d(i, i+1)^2 / sigma^2), sigma the median successive distance.
RecurrenceMatrix build_sequence_matrix(const FeatureMatrix& feat, Diagnostics* diag = nullptr);

RecurrenceMatrix combine(const RecurrenceMatrix& rep_x, const RecurrenceMatrix& rep_y,
                         const RecurrenceMatrix& seq_z, const CombineWeights& weights = {});

/// Debug export as a beat-axis "FEA1" container.
void write_recurrence_container(const std::filesystem::path& path, const RecurrenceMatrix& r);

}  // namespace rearrange
