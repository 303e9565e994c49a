#include "fixtures.h"

#include "rearrange/error.h"
#include "rearrange/segmentation.h"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <random>
#include <set>

using namespace rearrange;

namespace {

RecurrenceMatrix combined(const Matrix& values) {
  RecurrenceMatrix r;
  r.kind = RecurrenceKind::kCombined;
  r.values = values;
  return r;
}

Matrix random_r(std::mt19937_64& rng, int n, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (u(rng) < density) m(i, j) = m(j, i) = u(rng);
  return m;
}

// Two blocks of dense affinity joined by a weak chain.
Matrix two_blocks(int a, int b) {
  const int n = a + b;
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && ((i < a) == (j < a))) m(i, j) = 0.5;
  m(a - 1, a) = m(a, a - 1) = 0.01;
  return m;
}

void check_partition(const std::vector<Segment>& segs, std::size_t n, int level) {
  REQUIRE_FALSE(segs.empty());
  CHECK(segs.front().start_beat == 0);
  CHECK(segs.back().end_beat == n);
  std::set<int> labels;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    CHECK(segs[s].level == level);
    CHECK(segs[s].end_beat > segs[s].start_beat);
    labels.insert(segs[s].label);
    if (s > 0) {
      CHECK(segs[s].start_beat == segs[s - 1].end_beat);
      CHECK(segs[s].label != segs[s - 1].label);
    }
  }
  CHECK(static_cast<int>(labels.size()) <= level);
}

}  // namespace

TEST_CASE("empty graph gives the identity Laplacian") {
  const Matrix l = normalized_laplacian(combined(Matrix::Zero(3, 3)));
  CHECK(l.isApprox(Matrix::Identity(3, 3)));
}

TEST_CASE("complete graph on three nodes has spectrum {0, 1.5, 1.5}") {
  Matrix k3 = Matrix::Ones(3, 3);
  k3.diagonal().setZero();
  const Matrix l = normalized_laplacian(combined(k3));
  Eigen::SelfAdjointEigenSolver<Matrix> es(l);
  CHECK(es.eigenvalues()(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(es.eigenvalues()(1) == doctest::Approx(1.5));
  CHECK(es.eigenvalues()(2) == doctest::Approx(1.5));
}

TEST_CASE("Laplacian of random graphs is symmetric with spectrum in [0, 2]") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix l = normalized_laplacian(combined(random_r(rng, 10 + trial, 0.3)));
    CHECK((l - l.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(l);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    CHECK(es.eigenvalues().maxCoeff() <= 2.0 + 1e-8);
  }
}

TEST_CASE("segments_from_labels splits at change points") {
  const std::vector<int> labels{0, 0, 1, 1, 1, 0, 2};
  const auto segs = segments_from_labels(3, labels);
  REQUIRE(segs.size() == 4);
  CHECK(segs[0] == Segment{3, 0, 0, 2});
  CHECK(segs[1] == Segment{3, 1, 2, 5});
  CHECK(segs[2] == Segment{3, 0, 5, 6});
  CHECK(segs[3] == Segment{3, 2, 6, 7});
}

TEST_CASE("spectral levels partition the beats and respect cardinality") {
  std::mt19937_64 rng(23);
  const BeatGrid grid = testing::uniform_grid(40);
  const Matrix l = normalized_laplacian(combined(random_r(rng, 40, 0.2)));
  SegmentationOptions opt;
  opt.k_max = 8;
  opt.restarts = 10;
  const auto h = segment_levels(l, grid, opt);
  REQUIRE(h.levels.size() == 8);
  CHECK(h.levels.at(1).size() == 1);
  for (const auto& [k, segs] : h.levels) check_partition(segs, 40, k);
  CHECK(h.eigenvectors.cols() == 8);
  CHECK(std::is_sorted(h.eigenvalues.begin(), h.eigenvalues.end()));
  for (Eigen::Index c = 0; c < h.eigenvectors.cols(); ++c) {
    Eigen::Index arg = 0;
    h.eigenvectors.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(h.eigenvectors(arg, c) > 0.0);
  }
}

TEST_CASE("two-block affinity splits at the block edge on level 2") {
  const BeatGrid grid = testing::uniform_grid(32);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SegmentationOptions opt;
    opt.k_max = 2;
    opt.seed = seed;
    const auto h = segment_levels(normalized_laplacian(combined(two_blocks(16, 16))), grid, opt);
    const auto& l2 = h.levels.at(2);
    REQUIRE(l2.size() == 2);
    CHECK(l2[0].end_beat >= 15);
    CHECK(l2[0].end_beat <= 17);
  }
}

TEST_CASE("segmentation is deterministic") {
  std::mt19937_64 rng(29);
  const BeatGrid grid = testing::uniform_grid(30);
  const Matrix l = normalized_laplacian(combined(random_r(rng, 30, 0.25)));
  SegmentationOptions opt;
  opt.k_max = 6;
  opt.seed = 5;
  const auto a = segment_levels(l, grid, opt);
  const auto b = segment_levels(l, grid, opt);
  CHECK(a.levels == b.levels);
  CHECK(a.eigenvalues == b.eigenvalues);
}

TEST_CASE("min_segment_sec stops after the first level with a short segment") {
  std::mt19937_64 rng(31);
  const BeatGrid grid = testing::uniform_grid(40);
  const Matrix l = normalized_laplacian(combined(random_r(rng, 40, 0.2)));
  SegmentationOptions opt;
  opt.k_max = 12;
  opt.min_segment_sec = 1e9;
  const auto h = segment_levels(l, grid, opt);
  CHECK(h.levels.size() == 1);
}

TEST_CASE("k_max above the beat count is an error") {
  const BeatGrid grid = testing::uniform_grid(4);
  SegmentationOptions opt;
  opt.k_max = 5;
  CHECK_THROWS_AS(segment_levels(Matrix::Identity(4, 4), grid, opt), Error);
}

TEST_CASE("quantization moves a boundary to the nearest downbeat") {
  BeatGrid g;
  g.beats = {0.0, 0.5, 1.0, 1.1, 1.5, 2.0, 2.5};
  g.downbeats = {0.0, 1.0, 2.0};
  g.beats_per_measure = 2;
  g.total_duration = 3.0;
  SegmentationHierarchy h;
  h.levels[2] = {Segment{2, 0, 0, 3}, Segment{2, 1, 3, 7}};
  const auto q = quantize_to_downbeats(h, g);
  REQUIRE(q.levels.at(2).size() == 2);
  CHECK(q.levels.at(2)[0].end_beat == 2);
  CHECK(q.levels.at(2)[1].start_beat == 2);

  // Already on a downbeat: unchanged.
  h.levels[2] = {Segment{2, 0, 0, 5}, Segment{2, 1, 5, 7}};
  CHECK(quantize_to_downbeats(h, g).levels == h.levels);
}

TEST_CASE("quantization ties go to the earlier downbeat") {
  BeatGrid g;
  g.beats = {0.0, 1.0, 2.0, 3.0, 4.0};
  g.downbeats = {0.0, 2.0, 4.0};
  g.beats_per_measure = 2;
  g.total_duration = 5.0;
  SegmentationHierarchy h;
  h.levels[2] = {Segment{2, 0, 0, 3}, Segment{2, 1, 3, 5}};
  CHECK(quantize_to_downbeats(h, g).levels.at(2)[0].end_beat == 2);
}

TEST_CASE("quantization keeps partitions and puts every boundary on a downbeat") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> jitter(0.4, 0.6);
  std::uniform_int_distribution<int> lab(0, 3);
  std::uniform_int_distribution<int> run(1, 7);
  for (int trial = 0; trial < 100; ++trial) {
    BeatGrid g;
    g.beats_per_measure = 3 + trial % 3;
    double t = 0.0;
    for (int i = 0; i < 60; ++i) {
      g.beats.push_back(t);
      if (i % g.beats_per_measure == 0) g.downbeats.push_back(t);
      t += jitter(rng);
    }
    g.total_duration = t;
    std::vector<int> labels;
    int current = lab(rng);
    while (labels.size() < 60) {
      const int len = run(rng);
      for (int i = 0; i < len && labels.size() < 60; ++i) labels.push_back(current);
      current = (current + 1 + lab(rng) % 3) % 4;
    }
    SegmentationHierarchy h;
    h.levels[4] = segments_from_labels(4, labels);
    const auto q = quantize_to_downbeats(h, g);
    const auto& segs = q.levels.at(4);
    check_partition(segs, 60, 4);
    for (std::size_t s = 1; s < segs.size(); ++s) {
      CHECK(g.is_downbeat(segs[s].start_beat));
    }
    // Each original boundary moved by at most half of its enclosing measure.
    for (std::size_t s = 1; s < h.levels[4].size(); ++s) {
      const double t = g.beats[h.levels[4][s].start_beat];
      const auto next = std::upper_bound(g.downbeats.begin(), g.downbeats.end(), t);
      if (next == g.downbeats.end()) continue;
      const double prev = *(next - 1);
      const double shift = std::min(t - prev, *next - t);
      CHECK(shift <= 0.5 * (*next - prev) + 1e-12);
    }
  }
}

TEST_CASE("collect_global_segments flattens levels without duplicates") {
  SegmentationHierarchy h;
  h.levels[1] = {Segment{1, 0, 0, 8}};
  h.levels[2] = {Segment{2, 0, 0, 4}, Segment{2, 1, 4, 8}};
  CHECK(collect_global_segments(h).size() == 3);
  h.levels[3] = {Segment{3, 0, 0, 4}, Segment{3, 1, 4, 6}, Segment{3, 2, 6, 8}};
  const auto all = collect_global_segments(h);
  CHECK(all.size() == 6);
  CHECK(all.front().level == 1);
  CHECK(all.back().level == 3);
}
