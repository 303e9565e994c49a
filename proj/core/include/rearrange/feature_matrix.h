/// @file feature_matrix.h
/// @brief Frame- or beat-synchronous real-valued feature matrices.

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace rearrange {

/// Row-major dense matrix used for features, recurrence matrices and
/// Laplacians.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Axis : std::uint8_t { kFrames = 0, kBeats = 1 };

/// Tags for the three feature roles the pipeline consumes.
namespace feature_names {
inline constexpr const char* kRepetitionEmbedding = "repetition-embedding";
inline constexpr const char* kRepetitionCqt = "repetition-cqt";
inline constexpr const char* kHomogeneityEmbedding = "homogeneity-embedding";
}  // namespace feature_names

struct FeatureMatrix {
  Matrix values;
  Axis axis = Axis::kFrames;
  /// One ascending time per row; present iff axis == kFrames.
  std::vector<double> frame_times;
  std::string name;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }

  /// Throws Error on empty matrices, non-finite values or inconsistent
  /// frame times.
  void validate() const;
};

}  // namespace rearrange
