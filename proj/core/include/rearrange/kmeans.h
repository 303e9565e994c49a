/// @file kmeans.h
/// @brief Deterministic k-means with k-means++ seeding.

#pragma once

#include "rearrange/feature_matrix.h"

#include <cstdint>
#include <vector>

namespace rearrange {

struct KMeansResult {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = 0.0;
  /// Number of clusters actually used; below the request when the points
  /// have fewer distinct rows or reseeding kept failing.
  int effective_k = 0;
};

struct KMeansOptions {
  int restarts = 50;
  int max_iterations = 300;
  std::uint64_t seed = 0;
};

/// Best of `restarts` Lloyd runs by inertia (earliest wins ties). Empty
/// clusters are reseeded with the point farthest from its centroid. Labels
/// are numbered in order of first appearance.
KMeansResult kmeans(const Matrix& points, int k, const KMeansOptions& options = {});

}  // namespace rearrange
