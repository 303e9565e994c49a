#include "rearrange/pathfinder.h"

#include "rearrange/error.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

namespace rearrange {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTolerance = 1e-9;

}  // namespace

LayeredGraph::LayeredGraph(std::size_t n_beats, std::span<const TransitionPoint> transitions,
                           std::size_t n_layers)
    : n_beats_(n_beats), n_layers_(n_layers), adjacency_(n_beats) {
  if (n_beats < 1) throw Error(ErrorKind::kInvalidArgument, "layered graph needs at least one beat");
  for (std::size_t i = 0; i + 1 < n_beats; ++i) adjacency_[i].push_back(Edge{i + 1, 0.0, kNoSegment});
  for (std::size_t t = 0; t < transitions.size(); ++t) {
    const TransitionPoint& tp = transitions[t];
    if (tp.exit_beat == 0 || tp.exit_beat >= n_beats || tp.entry_beat >= n_beats ||
        tp.exit_beat == tp.entry_beat) {
      std::ostringstream os;
      os << "transition " << tp.exit_beat << " -> " << tp.entry_beat << " out of range for "
         << n_beats << " beats";
      throw Error(ErrorKind::kOutOfRange, os.str());
    }
    if (!(tp.cost >= 0.0) || !std::isfinite(tp.cost)) {
      throw Error(ErrorKind::kInvalidArgument, "transition cost must be finite and nonnegative");
    }
    adjacency_[tp.exit_beat - 1].push_back(Edge{tp.entry_beat, tp.cost, t});
  }
  for (auto& edges : adjacency_) {
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.to != b.to ? a.to < b.to : a.cost < b.cost;
    });
    edges.erase(std::unique(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.to == b.to; }),
                edges.end());
  }
}

std::size_t LayeredGraph::edge_count() const noexcept {
  if (n_layers_ < 2) return 0;
  std::size_t per_layer = 0;
  for (const auto& edges : adjacency_) per_layer += edges.size();
  return per_layer * (n_layers_ - 1);
}

std::span<const LayeredGraph::Edge> LayeredGraph::edges_from(std::size_t beat) const noexcept {
  return adjacency_[beat];
}

const LayeredGraph::Edge* LayeredGraph::find_edge(std::size_t from, std::size_t to) const noexcept {
  const auto& edges = adjacency_[from];
  auto it = std::lower_bound(edges.begin(), edges.end(), to, [](const Edge& e, std::size_t t) { return e.to < t; });
  return (it != edges.end() && it->to == to) ? &*it : nullptr;
}

std::vector<double> LayeredGraph::shortest_distances() const {
  std::vector<double> dist(vertex_count(), kInf);
  if (n_layers_ == 0) return dist;
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[vertex(0, 0)] = 0.0;
  queue.emplace(0.0, vertex(0, 0));
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    const std::size_t layer = v / n_beats_;
    if (layer + 1 >= n_layers_) continue;
    const std::size_t beat = v % n_beats_;
    for (const Edge& e : adjacency_[beat]) {
      const std::size_t w = vertex(e.to, layer + 1);
      const double nd = d + e.cost;
      if (nd < dist[w]) {
        dist[w] = nd;
        queue.emplace(nd, w);
      }
    }
  }
  return dist;
}

std::optional<std::vector<std::size_t>> LayeredGraph::extract_path(const std::vector<double>& dist,
                                                                  std::size_t length) const {
  if (length < 1 || length > n_layers_) return std::nullopt;
  const std::size_t last = n_beats_ - 1;
  if (!std::isfinite(dist[vertex(last, length - 1)])) return std::nullopt;

  // on_optimal[v]: v lies on some cheapest path to the target, i.e. a chain
  // of tight edges (dist[u] + cost == dist[w]) leads from v to the target.
  std::vector<char> on_optimal(n_beats_ * length, 0);
  on_optimal[vertex(last, length - 1)] = 1;
  for (std::size_t layer = length - 1; layer-- > 0;) {
    for (std::size_t u = 0; u < n_beats_; ++u) {
      const double du = dist[vertex(u, layer)];
      if (!std::isfinite(du)) continue;
      for (const Edge& e : adjacency_[u]) {
        const std::size_t w = vertex(e.to, layer + 1);
        if (on_optimal[w] && du + e.cost == dist[w]) {
          on_optimal[vertex(u, layer)] = 1;
          break;
        }
      }
    }
  }
  if (!on_optimal[vertex(0, 0)]) return std::nullopt;

  std::vector<std::size_t> beats{0};
  for (std::size_t layer = 0; layer + 1 < length; ++layer) {
    const std::size_t u = beats.back();
    const double du = dist[vertex(u, layer)];
    bool advanced = false;
    for (const Edge& e : adjacency_[u]) {  // ascending target beat
      const std::size_t w = vertex(e.to, layer + 1);
      if (on_optimal[w] && du + e.cost == dist[w]) {
        beats.push_back(e.to);
        advanced = true;
        break;
      }
    }
    if (!advanced) return std::nullopt;
  }
  return beats;
}

double path_duration(const BeatGrid& grid, std::span<const std::size_t> beats) {
  double total = 0.0;
  for (std::size_t b : beats) total += grid.beat_duration(b);
  return total;
}

namespace {

// Cheapest transition realizing the step from -> to (exit_beat == from + 1).
const TransitionPoint* cheapest_jump(std::span<const TransitionPoint> transitions, std::size_t from,
                                     std::size_t to) {
  const TransitionPoint* best = nullptr;
  for (const auto& t : transitions) {
    if (t.exit_beat == from + 1 && t.entry_beat == to && (best == nullptr || t.cost < best->cost)) best = &t;
  }
  return best;
}

}  // namespace

BeatPath make_path(const BeatGrid& grid, std::span<const TransitionPoint> transitions,
                   std::vector<std::size_t> beats) {
  BeatPath path;
  path.beats = std::move(beats);
  path.realized_duration = path_duration(grid, path.beats);
  for (std::size_t l = 0; l + 1 < path.beats.size(); ++l) {
    const std::size_t a = path.beats[l];
    const std::size_t b = path.beats[l + 1];
    if (b == a + 1) continue;
    const TransitionPoint* t = cheapest_jump(transitions, a, b);
    if (t == nullptr) {
      std::ostringstream os;
      os << "no transition realizes step " << a << " -> " << b;
      throw Error(ErrorKind::kInvalidArgument, os.str());
    }
    path.total_cost += t->cost;
    path.jumps.push_back(Jump{l, *t});
  }
  return path;
}

std::optional<BeatPath> solve_fixed_length(const BeatGrid& grid,
                                           std::span<const TransitionPoint> transitions,
                                           std::size_t length) {
  const LayeredGraph graph(grid.size(), transitions, length);
  auto beats = graph.extract_path(graph.shortest_distances(), length);
  if (!beats) return std::nullopt;
  return make_path(grid, transitions, std::move(*beats));
}

BeatPath solve(const BeatGrid& grid, std::span<const TransitionPoint> transitions,
               double target_duration) {
  grid.validate();
  if (!(target_duration > 0.0) || !std::isfinite(target_duration)) {
    throw Error(ErrorKind::kInvalidArgument, "target duration must be positive");
  }
  const auto g = static_cast<long long>(grid.beats_per_measure);
  const long long centre = std::llround(target_duration / grid.median_beat_duration());
  const long long lo = std::max(2LL, centre - 2 * g);
  const long long hi = centre + 2 * g;
  const double radius = grid.mean_measure_duration();

  std::optional<BeatPath> best;
  if (hi >= lo) {
    const LayeredGraph graph(grid.size(), transitions, static_cast<std::size_t>(hi));
    const auto dist = graph.shortest_distances();
    for (long long length = lo; length <= hi; ++length) {
      auto beats = graph.extract_path(dist, static_cast<std::size_t>(length));
      if (!beats) continue;
      BeatPath candidate = make_path(grid, transitions, std::move(*beats));
      if (std::abs(candidate.realized_duration - target_duration) > radius + kTolerance) continue;
      if (!best || candidate.total_cost < best->total_cost ||
          (candidate.total_cost == best->total_cost && candidate.beats < best->beats)) {
        best = std::move(candidate);
      }
    }
  }
  if (!best) {
    std::ostringstream os;
    os << "no beat path of " << lo << ".." << hi << " beats lands within " << radius << " s of "
       << target_duration << " s (source " << grid.total_duration << " s, " << transitions.size()
       << " transitions)";
    throw InfeasibleError(os.str());
  }
  return *best;
}

ValidationReport validate_path(const BeatPath& path, const BeatGrid& grid,
                               std::span<const TransitionPoint> transitions, double target) {
  ValidationReport report;
  const std::size_t n = grid.size();
  const auto& a = path.beats;

  report.starts_at_first_beat = !a.empty() && a.front() == 0;
  if (!report.starts_at_first_beat) report.messages.emplace_back("path does not start at the first beat");
  report.ends_at_last_beat = !a.empty() && a.back() + 1 == n;
  if (!report.ends_at_last_beat) report.messages.emplace_back("path does not end at the last beat");

  // Cheapest cost per step (from, to) from the raw transition list.
  std::map<std::pair<std::size_t, std::size_t>, double> step_cost;
  for (const auto& t : transitions) {
    if (t.exit_beat == 0) continue;
    const auto key = std::make_pair(t.exit_beat - 1, t.entry_beat);
    auto it = step_cost.find(key);
    if (it == step_cost.end() || t.cost < it->second) step_cost[key] = t.cost;
  }

  report.transitions_exist = !a.empty();
  double cost = 0.0;
  double duration = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a[l] >= n) {
      report.transitions_exist = false;
      report.messages.emplace_back("beat index out of range");
      break;
    }
    duration += grid.beat_duration(a[l]);
    if (l + 1 == a.size()) break;
    if (a[l + 1] == a[l] + 1) continue;
    auto it = step_cost.find({a[l], a[l + 1]});
    if (it == step_cost.end()) {
      report.transitions_exist = false;
      std::ostringstream os;
      os << "step " << a[l] << " -> " << a[l + 1] << " has no transition";
      report.messages.push_back(os.str());
    } else {
      cost += it->second;
    }
  }

  const double radius = grid.mean_measure_duration();
  report.duration_within_radius = report.transitions_exist &&
                                  std::abs(duration - target) <= radius + kTolerance &&
                                  std::abs(duration - path.realized_duration) <= kTolerance;
  if (!report.duration_within_radius) {
    std::ostringstream os;
    os << "duration " << duration << " s (reported " << path.realized_duration << " s) vs target "
       << target << " s, radius " << radius << " s";
    report.messages.push_back(os.str());
  }
  report.cost_consistent = report.transitions_exist && std::abs(cost - path.total_cost) <= kTolerance;
  if (!report.cost_consistent) report.messages.emplace_back("total cost does not match summed step costs");
  return report;
}

}  // namespace rearrange
