#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <vector>

#include "copref/community.hpp"
#include "copref/errors.hpp"

namespace copref {

namespace {

struct WardCandidate {
  double delta;        // Ward cost of merging, lower is better
  std::uint32_t a, b;  // community ids, a < b

  bool operator<(const WardCandidate& other) const {
    if (delta != other.delta) return delta > other.delta;  // min-heap on delta
    if (a != other.a) return a > other.a;
    return b > other.b;
  }
};

}  // namespace

// Pons-Latapy: nodes are embedded by their t-step random-walk distributions,
// communities are merged bottom-up (adjacent pairs only) by Ward's criterion
// on the degree-normalized walk distance, and the merge sequence is cut at
// the modularity maximum. Walks never leave a connected component, so neither
// do communities.
CommunityReport walktrap(const WeightedGraph& graph, const AlgorithmParams& params) {
  detail::require_nonempty(graph, "walktrap");
  const std::size_t n = graph.node_count();
  const double two_m = 2.0 * graph.total_weight();
  const int t = params.walk_length;

  std::vector<double> degree(n), inv_degree(n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) {
    degree[i] = graph.weighted_degree(i);
    if (degree[i] > 0.0) inv_degree[i] = 1.0 / degree[i];
  }

  // walk[i][k] = probability that a t-step walk from i ends at k, for the
  // transition matrix P = D^{-1} W. Isolated nodes keep their unit mass and
  // sit in singleton communities that nothing ever merges with.
  std::vector<std::vector<double>> walk(n);
  {
    std::vector<double> cur(n), next(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      std::fill(cur.begin(), cur.end(), 0.0);
      cur[i] = 1.0;
      for (int step = 0; step < t; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::uint32_t j = 0; j < n; ++j) {
          if (cur[j] == 0.0) continue;
          if (degree[j] == 0.0) {
            next[j] += cur[j];
            continue;
          }
          const double mass = cur[j] * inv_degree[j];
          for (const auto& nb : graph.neighbors(j)) next[nb.node] += mass * nb.weight;
        }
        std::swap(cur, next);
      }
      walk[i] = cur;
    }
  }

  // Community state; ids grow past n as merges create new communities.
  const std::size_t max_communities = 2 * n;
  std::vector<int> size(max_communities, 0);
  std::vector<std::vector<double>> mean_walk(max_communities);  // average member row
  std::vector<bool> alive(max_communities, false);
  std::vector<std::map<std::uint32_t, double>> nbrs(max_communities);
  std::vector<double> total(max_communities, 0.0);  // degree sums
  for (std::uint32_t i = 0; i < n; ++i) {
    size[i] = 1;
    mean_walk[i] = std::move(walk[i]);
    alive[i] = true;
    total[i] = degree[i];
  }
  for (const auto& e : graph.edges()) {
    nbrs[e.a][e.b] += e.weight;
    nbrs[e.b][e.a] += e.weight;
  }

  auto walk_distance2 = [&](std::uint32_t a, std::uint32_t b) {
    double d2 = 0.0;
    const double* pa = mean_walk[a].data();
    const double* pb = mean_walk[b].data();
    for (std::size_t k = 0; k < n; ++k) {
      const double diff = pa[k] - pb[k];
      d2 += diff * diff * inv_degree[k];
    }
    return d2;
  };
  auto ward_delta = [&](std::uint32_t a, std::uint32_t b) {
    const double sa = size[a], sb = size[b];
    return sa * sb / (sa + sb) / static_cast<double>(n) * walk_distance2(a, b);
  };

  std::priority_queue<WardCandidate> heap;
  for (const auto& e : graph.edges()) heap.push({ward_delta(e.a, e.b), e.a, e.b});

  // Q bookkeeping over the original graph.
  double q = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) q -= (degree[i] / two_m) * (degree[i] / two_m);

  CommunityReport report;
  report.algorithm = algorithm_name(Algorithm::walktrap);
  report.params = params;
  report.quality_trace.push_back(q);

  double best_q = q;
  std::size_t best_step = 0;
  std::vector<std::array<std::uint32_t, 3>> merges;  // (a, b, merged id)
  std::uint32_t next_id = static_cast<std::uint32_t>(n);

  while (!heap.empty()) {
    const WardCandidate top = heap.top();
    heap.pop();
    if (!alive[top.a] || !alive[top.b]) continue;
    auto ab = nbrs[top.a].find(top.b);
    if (ab == nbrs[top.a].end()) continue;
    if (ward_delta(top.a, top.b) != top.delta) continue;  // stale gain

    const std::uint32_t a = top.a, b = top.b, c = next_id++;
    const double between_ab = ab->second;

    alive[a] = alive[b] = false;
    alive[c] = true;
    size[c] = size[a] + size[b];
    total[c] = total[a] + total[b];

    mean_walk[c].resize(n);
    const double wa = static_cast<double>(size[a]) / size[c];
    const double wb = static_cast<double>(size[b]) / size[c];
    for (std::size_t k = 0; k < n; ++k)
      mean_walk[c][k] = wa * mean_walk[a][k] + wb * mean_walk[b][k];
    mean_walk[a] = {};
    mean_walk[b] = {};

    nbrs[a].erase(b);
    nbrs[b].erase(a);
    for (const auto& [x, w] : nbrs[a]) {
      nbrs[x].erase(a);
      nbrs[x][c] += w;
      nbrs[c][x] += w;
    }
    for (const auto& [x, w] : nbrs[b]) {
      nbrs[x].erase(b);
      nbrs[x][c] += w;
      nbrs[c][x] += w;
    }
    nbrs[a].clear();
    nbrs[b].clear();
    for (const auto& [x, w] : nbrs[c]) {
      (void)w;
      const auto [lo, hi] = std::minmax(c, x);
      heap.push({ward_delta(lo, hi), lo, hi});
    }

    // Q after this merge: the pair's between-weight moves inside.
    q += 2.0 * (between_ab / two_m - (total[a] / two_m) * (total[b] / two_m));
    merges.push_back({a, b, c});
    report.quality_trace.push_back(q);
    if (q > best_q) {
      best_q = q;
      best_step = merges.size();
    }
  }

  // Replay to the Q peak: every original node follows its merge chain.
  std::vector<std::uint32_t> parent(next_id);
  for (std::uint32_t i = 0; i < next_id; ++i) parent[i] = i;
  for (std::size_t s = 0; s < best_step; ++s) {
    parent[merges[s][0]] = merges[s][2];
    parent[merges[s][1]] = merges[s][2];
  }
  std::vector<std::uint32_t> label(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t x = i;
    while (parent[x] != x) x = parent[x];
    label[i] = x;
  }

  report.partition = Partition(std::move(label));
  detail::finalize_report(graph, report);
  return report;
}

}  // namespace copref
