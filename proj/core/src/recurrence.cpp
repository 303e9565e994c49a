#include "rearrange/recurrence.h"

#include "rearrange/beat_grid.h"
#include "rearrange/features.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rearrange {

const char* to_string(RecurrenceKind kind) noexcept {
  switch (kind) {
    case RecurrenceKind::kRepetition: return "repetition";
    case RecurrenceKind::kSequence: return "sequence";
    case RecurrenceKind::kCombined: return "combined";
  }
  return "unknown";
}

void CombineWeights::validate() const {
  if (repetition_x < 0.0 || repetition_y < 0.0 || sequence_z < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "combination weights must be nonnegative");
  }
  if (std::abs(repetition_x + repetition_y + sequence_z - 1.0) > 1e-9) {
    throw Error(ErrorKind::kInvalidArgument, "combination weights must sum to 1");
  }
}

int default_knn(Eigen::Index n) {
  const int k = static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(n))));
  return std::clamp(k, 1, std::max(1, static_cast<int>(n) - 1));
}

namespace {

void require_beats(const FeatureMatrix& feat, const char* what) {
  if (feat.axis != Axis::kBeats) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " expects beat-synchronous features");
  }
  if (feat.rows() < 2) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " needs at least 2 beats");
  }
  if (!feat.values.allFinite()) {
    throw Error(ErrorKind::kNonFinite, std::string(what) + ": non-finite feature values");
  }
}

// Euclidean distance with a fixed left-to-right summation order.
double distance(const Matrix& x, Eigen::Index i, Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double d = x(i, c) - x(j, c);
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

RecurrenceMatrix build_repetition_recurrence(const FeatureMatrix& feat, int k_nn, Diagnostics* diag) {
  require_beats(feat, "build_repetition_recurrence");
  const Eigen::Index n = feat.rows();
  if (k_nn < 1 || k_nn >= n) {
    std::ostringstream os;
    os << "k_nn must lie in [1, " << n - 1 << "], got " << k_nn;
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }

  Matrix dist = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = distance(feat.values, i, j);
    }
  }

  // neighbour(i, j): j is among the k nearest beats of i (ties to lower index).
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> neighbour =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  std::vector<double> kth(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) order[w++] = j;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return dist(i, a) < dist(i, b); });
    for (int r = 0; r < k_nn; ++r) neighbour(i, order[static_cast<std::size_t>(r)]) = true;
    kth[static_cast<std::size_t>(i)] = dist(i, order[static_cast<std::size_t>(k_nn - 1)]);
  }

  double mu = median(kth);
  if (!(mu > 0.0)) {
    warn(diag, "repetition recurrence: median k-th neighbour distance is 0, using bandwidth 1");
    mu = 1.0;
  }

  RecurrenceMatrix r;
  r.kind = RecurrenceKind::kRepetition;
  r.bandwidth = mu;
  r.values = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (neighbour(i, j) && neighbour(j, i)) {
        r.values(i, j) = r.values(j, i) = std::exp(-dist(i, j) / mu);
      }
    }
  }
  return r;
}

RecurrenceMatrix build_sequence_matrix(const FeatureMatrix& feat, Diagnostics* diag) {
  require_beats(feat, "build_sequence_matrix");
  const Eigen::Index n = feat.rows();
  std::vector<double> step(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i + 1 < n; ++i) step[static_cast<std::size_t>(i)] = distance(feat.values, i, i + 1);

  double sigma = median(step);
  if (!(sigma > 0.0)) {
    warn(diag, "sequence matrix: median successive distance is 0, using bandwidth 1");
    sigma = 1.0;
  }

  RecurrenceMatrix r;
  r.kind = RecurrenceKind::kSequence;
  r.bandwidth = sigma;
  r.values = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double d = step[static_cast<std::size_t>(i)];
    r.values(i, i + 1) = r.values(i + 1, i) = std::exp(-(d * d) / (sigma * sigma));
  }
  return r;
}

RecurrenceMatrix combine(const RecurrenceMatrix& rep_x, const RecurrenceMatrix& rep_y,
                         const RecurrenceMatrix& seq_z, const CombineWeights& weights) {
  weights.validate();
  const Eigen::Index n = rep_x.size();
  for (const RecurrenceMatrix* m : {&rep_x, &rep_y, &seq_z}) {
    if (m->values.rows() != n || m->values.cols() != n) {
      throw Error(ErrorKind::kInvalidArgument, "combine: recurrence matrices differ in size");
    }
  }
  if (rep_x.kind != RecurrenceKind::kRepetition || rep_y.kind != RecurrenceKind::kRepetition ||
      seq_z.kind != RecurrenceKind::kSequence) {
    throw Error(ErrorKind::kInvalidArgument, "combine expects (repetition, repetition, sequence)");
  }
  RecurrenceMatrix r;
  r.kind = RecurrenceKind::kCombined;
  r.bandwidth = 0.0;
  r.values = weights.repetition_x * rep_x.values + weights.repetition_y * rep_y.values +
             weights.sequence_z * seq_z.values;
  return r;
}

void write_recurrence_container(const std::filesystem::path& path, const RecurrenceMatrix& r) {
  FeatureMatrix m;
  m.name = to_string(r.kind);
  m.axis = Axis::kBeats;
  m.values = r.values;
  write_feature_container(path, m);
}

}  // namespace rearrange
