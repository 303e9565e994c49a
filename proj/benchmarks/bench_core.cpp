/// @file bench_core.cpp
/// @brief Timings for the recurrence, segmentation and path search stages.

#include "rearrange/pathfinder.h"
#include "rearrange/recurrence.h"
#include "rearrange/segmentation.h"

#include <benchmark/benchmark.h>

#include <random>

using namespace rearrange;

namespace {

FeatureMatrix random_features(Eigen::Index beats, Eigen::Index dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  FeatureMatrix f;
  f.axis = Axis::kBeats;
  f.values.resize(beats, dims);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values.data()[i] = n(rng);
  return f;
}

BeatGrid grid_of(std::size_t beats) {
  BeatGrid grid;
  for (std::size_t i = 0; i < beats; ++i) {
    grid.beats.push_back(0.5 * static_cast<double>(i));
    if (i % 4 == 0) grid.downbeats.push_back(grid.beats.back());
  }
  grid.sample_rate = 22050;
  grid.total_duration = 0.5 * static_cast<double>(beats);
  return grid;
}

RecurrenceMatrix combined(Eigen::Index beats) {
  const int k = default_knn(beats);
  return combine(build_repetition_recurrence(random_features(beats, 12, 1), k),
                 build_repetition_recurrence(random_features(beats, 12, 2), k),
                 build_sequence_matrix(random_features(beats, 12, 3)));
}

void BM_Recurrence(benchmark::State& state) {
  const auto beats = static_cast<Eigen::Index>(state.range(0));
  const auto f = random_features(beats, 12, 1);
  const int k = default_knn(beats);
  for (auto _ : state) benchmark::DoNotOptimize(build_repetition_recurrence(f, k));
}
BENCHMARK(BM_Recurrence)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Segmentation(benchmark::State& state) {
  const auto beats = static_cast<std::size_t>(state.range(0));
  const Matrix l = normalized_laplacian(combined(static_cast<Eigen::Index>(beats)));
  const BeatGrid grid = grid_of(beats);
  for (auto _ : state) benchmark::DoNotOptimize(segment_levels(l, grid));
}
BENCHMARK(BM_Segmentation)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Solve(benchmark::State& state) {
  const auto beats = static_cast<std::size_t>(state.range(0));
  const BeatGrid grid = grid_of(beats);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> measure(1, beats / 4 - 1);
  std::uniform_real_distribution<double> cost(0.05, 1.0);
  std::vector<TransitionPoint> ts;
  while (ts.size() < static_cast<std::size_t>(state.range(1))) {
    TransitionPoint t;
    t.exit_beat = 4 * measure(rng);
    t.entry_beat = 4 * measure(rng);
    if (t.exit_beat == t.entry_beat) continue;
    t.cost = cost(rng);
    t.kind = TransitionKind::kSegment;
    ts.push_back(t);
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve(grid, ts, 0.5 * grid.total_duration));
}
BENCHMARK(BM_Solve)->Args({256, 200})->Args({512, 1000})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
