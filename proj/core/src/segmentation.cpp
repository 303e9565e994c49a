#include "rearrange/segmentation.h"

#include "rearrange/kmeans.h"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

namespace rearrange {

Matrix normalized_laplacian(const RecurrenceMatrix& r) {
  const Eigen::Index n = r.size();
  if (r.values.cols() != n) throw Error(ErrorKind::kInvalidArgument, "laplacian: matrix not square");
  std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = r.values.row(i).sum();
    if (!(d > 0.0)) d = 1.0;  // isolated beat
    inv_sqrt[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(d);
  }
  Matrix l(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = r.values(i, j) * (inv_sqrt[static_cast<std::size_t>(i)] * inv_sqrt[static_cast<std::size_t>(j)]);
      l(i, j) = (i == j ? 1.0 : 0.0) - w;
    }
  }
  return l;
}

std::vector<Segment> segments_from_labels(int level, std::span<const int> labels) {
  std::vector<Segment> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= labels.size(); ++i) {
    if (i == labels.size() || labels[i] != labels[start]) {
      out.push_back(Segment{level, labels[start], start, i});
      start = i;
    }
  }
  return out;
}

namespace {

// Labels renumbered in order of first appearance along the beat axis.
std::vector<int> canonical_labels(const std::vector<int>& labels) {
  std::vector<int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    if (static_cast<std::size_t>(l) >= remap.size()) remap.resize(static_cast<std::size_t>(l) + 1, -1);
    if (remap[static_cast<std::size_t>(l)] < 0) {
      remap[static_cast<std::size_t>(l)] = static_cast<int>(std::count_if(remap.begin(), remap.end(), [](int v) { return v >= 0; }));
    }
    out[i] = remap[static_cast<std::size_t>(l)];
  }
  return out;
}

double segment_seconds(const Segment& s, const BeatGrid& grid) {
  return grid.beat_end(s.end_beat - 1) - grid.beat_start(s.start_beat);
}

}  // namespace

SegmentationHierarchy segment_levels(const Matrix& laplacian, const BeatGrid& grid,
                                     const SegmentationOptions& options, Diagnostics* diag) {
  const Eigen::Index n = laplacian.rows();
  if (laplacian.cols() != n || n == 0) {
    throw Error(ErrorKind::kInvalidArgument, "segment_levels: laplacian must be square and non-empty");
  }
  if (static_cast<std::size_t>(n) != grid.size()) {
    throw Error(ErrorKind::kInvalidArgument, "segment_levels: laplacian size differs from beat count");
  }
  if (options.k_max < 1 || options.k_max > n) {
    std::ostringstream os;
    os << "segment_levels: k_max must lie in [1, " << n << "], got " << options.k_max;
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  if (!laplacian.allFinite()) {
    throw Error(ErrorKind::kNumerical, "eigendecomposition failed: non-finite laplacian");
  }

  const Eigen::MatrixXd dense = laplacian;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumerical, "eigendecomposition failed to converge");
  }

  SegmentationHierarchy h;
  const Eigen::VectorXd& evals = solver.eigenvalues();
  h.eigenvalues.assign(evals.data(), evals.data() + evals.size());
  h.eigenvectors = solver.eigenvectors().leftCols(options.k_max);
  for (Eigen::Index c = 0; c < h.eigenvectors.cols(); ++c) {
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(h.eigenvectors(i, c)) > std::abs(h.eigenvectors(arg, c))) arg = i;
    }
    if (h.eigenvectors(arg, c) < 0.0) h.eigenvectors.col(c) *= -1.0;
  }

  for (int k = 1; k <= options.k_max; ++k) {
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    if (k > 1) {
      Matrix embedding = h.eigenvectors.leftCols(k);
      if (options.normalize_rows) {
        for (Eigen::Index i = 0; i < n; ++i) {
          const double norm = embedding.row(i).norm();
          if (norm > 0.0) embedding.row(i) /= norm;
        }
      }
      KMeansOptions km;
      km.restarts = options.restarts;
      km.seed = options.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k);
      const KMeansResult result = kmeans(embedding, k, km);
      if (result.effective_k < k) {
        std::ostringstream os;
        os << "level " << k << ": clustering used " << result.effective_k << " clusters";
        warn(diag, os.str());
      }
      labels = canonical_labels(result.labels);
    }
    auto segments = segments_from_labels(k, labels);
    const bool stop = options.min_segment_sec.has_value() &&
                      std::any_of(segments.begin(), segments.end(), [&](const Segment& s) {
                        return segment_seconds(s, grid) <= *options.min_segment_sec;
                      });
    h.levels.emplace(k, std::move(segments));
    if (stop) break;
  }
  return h;
}

SegmentationHierarchy quantize_to_downbeats(const SegmentationHierarchy& h, const BeatGrid& grid) {
  const auto downbeat_idx = grid.downbeat_beat_indices();
  if (downbeat_idx.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "quantize_to_downbeats: grid has no downbeats");
  }
  const std::size_t n = grid.size();

  auto nearest_downbeat = [&](std::size_t beat) {
    const double t = grid.beats[beat];
    std::size_t best = downbeat_idx.front();
    double best_d = std::abs(grid.beats[best] - t);
    for (std::size_t idx : downbeat_idx) {
      const double d = std::abs(grid.beats[idx] - t);
      if (d < best_d) {  // strict: ties keep the earlier downbeat
        best_d = d;
        best = idx;
      }
    }
    return best;
  };

  SegmentationHierarchy out;
  out.eigenvalues = h.eigenvalues;
  out.eigenvectors = h.eigenvectors;
  for (const auto& [level, segments] : h.levels) {
    std::vector<Segment> moved;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      Segment seg = segments[s];
      seg.start_beat = s == 0 ? 0 : nearest_downbeat(segments[s].start_beat);
      seg.end_beat = s + 1 == segments.size() ? n : nearest_downbeat(segments[s + 1].start_beat);
      if (seg.end_beat <= seg.start_beat) continue;
      if (!moved.empty()) {
        // A dropped segment's span went to its predecessor.
        seg.start_beat = moved.back().end_beat;
        if (moved.back().label == seg.label) {
          moved.back().end_beat = seg.end_beat;
          continue;
        }
      } else {
        seg.start_beat = 0;
      }
      moved.push_back(seg);
    }
    moved.back().end_beat = n;
    out.levels.emplace(level, std::move(moved));
  }
  return out;
}

std::vector<Segment> collect_global_segments(const SegmentationHierarchy& h) {
  std::vector<Segment> out;
  std::set<std::tuple<int, std::size_t, std::size_t>> seen;
  for (const auto& [level, segments] : h.levels) {
    for (const auto& s : segments) {
      if (seen.emplace(s.level, s.start_beat, s.end_beat).second) out.push_back(s);
    }
  }
  return out;
}

}  // namespace rearrange
