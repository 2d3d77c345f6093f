#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <vector>

#include "copref/community.hpp"
#include "copref/errors.hpp"

namespace copref {

namespace {

struct MergeCandidate {
  double gain;
  std::uint32_t a, b;  // community labels, a < b

  // Max-heap on gain; ties resolve to the lowest (a, b) pair.
  bool operator<(const MergeCandidate& other) const {
    if (gain != other.gain) return gain < other.gain;
    if (a != other.a) return a > other.a;
    return b > other.b;
  }
};

}  // namespace

// Clauset-Newman-Moore agglomeration: start from singletons, repeatedly merge
// the connected community pair with the largest modularity increase, and cut
// the merge sequence where Q peaks. Only connected pairs merge, so communities
// never span two components.
CommunityReport fast_greedy(const WeightedGraph& graph, const AlgorithmParams& params) {
  detail::require_nonempty(graph, "fastgreedy");
  const std::size_t n = graph.node_count();
  const double two_m = 2.0 * graph.total_weight();

  // Between-community weights, mirrored per community for O(deg) merges.
  std::vector<std::map<std::uint32_t, double>> nbrs(n);
  std::vector<double> total(n);  // community degree sums
  for (std::uint32_t i = 0; i < n; ++i) total[i] = graph.weighted_degree(i);
  for (const auto& e : graph.edges()) {
    nbrs[e.a][e.b] += e.weight;
    nbrs[e.b][e.a] += e.weight;
  }

  auto gain_of = [&](std::uint32_t a, std::uint32_t b, double weight_ab) {
    return 2.0 * (weight_ab / two_m - (total[a] / two_m) * (total[b] / two_m));
  };

  std::priority_queue<MergeCandidate> heap;
  for (const auto& e : graph.edges()) heap.push({gain_of(e.a, e.b, nbrs[e.a][e.b]), e.a, e.b});

  std::vector<bool> alive(n, true);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> merges;  // (kept, absorbed)

  // Q of the singleton partition.
  double q = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) q -= (total[i] / two_m) * (total[i] / two_m);

  CommunityReport report;
  report.algorithm = algorithm_name(Algorithm::fast_greedy);
  report.params = params;
  report.quality_trace.push_back(q);

  double best_q = q;
  std::size_t best_step = 0;

  while (!heap.empty()) {
    const MergeCandidate top = heap.top();
    heap.pop();
    if (!alive[top.a] || !alive[top.b]) continue;
    auto it = nbrs[top.a].find(top.b);
    if (it == nbrs[top.a].end()) continue;
    // Heap entries go stale when either side merges; every update pushed a
    // fresh entry, so skip any whose gain no longer matches.
    if (gain_of(top.a, top.b, it->second) != top.gain) continue;

    // Merge b into a.
    const std::uint32_t a = top.a, b = top.b;
    q += top.gain;
    merges.push_back({a, b});
    report.quality_trace.push_back(q);
    if (q > best_q) {
      best_q = q;
      best_step = merges.size();
    }

    alive[b] = false;
    total[a] += total[b];
    nbrs[a].erase(b);
    nbrs[b].erase(a);
    for (const auto& [c, w] : nbrs[b]) {
      nbrs[c].erase(b);
      nbrs[c][a] += w;
      nbrs[a][c] += w;
    }
    nbrs[b].clear();
    // Fresh gains for every pair now touching a (their totals changed).
    for (const auto& [c, w] : nbrs[a]) {
      const auto [lo, hi] = std::minmax(a, c);
      heap.push({gain_of(lo, hi, w), lo, hi});
    }
  }

  // Replay merges up to the Q peak.
  std::vector<std::uint32_t> parent(n);
  for (std::uint32_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t s = 0; s < best_step; ++s)
    parent[find(merges[s].second)] = find(merges[s].first);
  std::vector<std::uint32_t> label(n);
  for (std::uint32_t i = 0; i < n; ++i) label[i] = find(i);

  report.partition = Partition(std::move(label));
  detail::finalize_report(graph, report);
  return report;
}

}  // namespace copref
