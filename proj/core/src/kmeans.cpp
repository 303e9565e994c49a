#include "rearrange/kmeans.h"

#include "rearrange/error.h"

#include <algorithm>
#include <limits>
#include <random>
#include <set>

namespace rearrange {

namespace {

// Uniform double in [0, 1) built from raw engine bits so results do not
// depend on the standard library's distribution implementation.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double squared_distance(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double d = a(i, c) - b(j, c);
    acc += d * d;
  }
  return acc;
}

int count_distinct_rows(const Matrix& points) {
  std::set<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    rows.emplace(points.row(i).begin(), points.row(i).end());
  }
  return static_cast<int>(rows.size());
}

Matrix seed_plus_plus(const Matrix& points, int k, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  Matrix centroids(k, points.cols());
  auto first = static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n));
  centroids.row(0) = points.row(std::min(first, n - 1));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = squared_distance(points, i, centroids, 0);

  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (acc > target && d2[static_cast<std::size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n));
      pick = std::min(pick, n - 1);
    }
    centroids.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], squared_distance(points, i, centroids, c));
    }
  }
  return centroids;
}

struct Run {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = 0.0;
  int k = 0;
};

Run lloyd(const Matrix& points, Matrix centroids, int max_iterations) {
  const Eigen::Index n = points.rows();
  int k = static_cast<int>(centroids.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  constexpr int kMaxReseeds = 50;
  int reseeds = 0;

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = squared_distance(points, i, centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }

    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    Matrix sums = Matrix::Zero(k, points.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = labels[static_cast<std::size_t>(i)];
      ++counts[static_cast<std::size_t>(c)];
      sums.row(c) += points.row(i);
    }

    bool reseeded = false;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        continue;
      }
      if (reseeds < kMaxReseeds) {
        // Reseed with the point farthest from its current centroid.
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d = squared_distance(points, i, centroids, labels[static_cast<std::size_t>(i)]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centroids.row(c) = points.row(far);
        ++reseeds;
        reseeded = true;
      }
    }
    if (!reseeded && reseeds >= kMaxReseeds) {
      // Give up on persistently empty clusters.
      std::vector<int> remap(static_cast<std::size_t>(k), -1);
      int kept = 0;
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) remap[static_cast<std::size_t>(c)] = kept++;
      }
      if (kept < k) {
        Matrix compact(kept, points.cols());
        for (int c = 0; c < k; ++c) {
          if (remap[static_cast<std::size_t>(c)] >= 0) compact.row(remap[static_cast<std::size_t>(c)]) = centroids.row(c);
        }
        for (auto& l : labels) l = remap[static_cast<std::size_t>(l)];
        centroids = std::move(compact);
        k = kept;
        changed = true;
      }
    }
    if (!changed && !reseeded) break;
  }

  Run run;
  run.k = k;
  run.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) run.inertia += squared_distance(points, i, centroids, labels[static_cast<std::size_t>(i)]);
  run.labels = std::move(labels);
  run.centroids = std::move(centroids);
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, const KMeansOptions& options) {
  if (points.rows() == 0) throw Error(ErrorKind::kInvalidArgument, "kmeans: no points");
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "kmeans: k must be >= 1");
  if (!points.allFinite()) throw Error(ErrorKind::kNonFinite, "kmeans: non-finite points");

  const int effective = std::min(k, count_distinct_rows(points));
  std::mt19937_64 rng(options.seed);
  Run best;
  best.inertia = std::numeric_limits<double>::infinity();
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    Run run = lloyd(points, seed_plus_plus(points, effective, rng), options.max_iterations);
    if (run.inertia < best.inertia) best = std::move(run);
  }

  // Renumber clusters by first appearance along the rows.
  std::vector<int> order(static_cast<std::size_t>(best.k), -1);
  int next = 0;
  for (int l : best.labels) {
    if (order[static_cast<std::size_t>(l)] < 0) order[static_cast<std::size_t>(l)] = next++;
  }
  KMeansResult out;
  out.centroids.resize(best.k, points.cols());
  for (int c = 0; c < best.k; ++c) out.centroids.row(order[static_cast<std::size_t>(c)]) = best.centroids.row(c);
  out.labels = std::move(best.labels);
  for (auto& l : out.labels) l = order[static_cast<std::size_t>(l)];
  out.inertia = best.inertia;
  out.effective_k = best.k;
  return out;
}

}  // namespace rearrange
