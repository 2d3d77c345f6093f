#include <algorithm>
#include <numeric>
#include <vector>

#include "copref/community.hpp"
#include "copref/errors.hpp"
#include "copref/rng.hpp"

namespace copref {

namespace {

// Working graph for the multilevel passes. Unlike WeightedGraph this carries
// self-loops, which appear as soon as communities collapse into super-nodes.
struct LevelGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency;
  std::vector<double> self_loop;  // internal weight per node, counted once
  std::vector<double> degree;     // weighted degree incl. 2 * self_loop
  double two_m = 0.0;

  std::size_t size() const { return adjacency.size(); }
};

LevelGraph make_level(const WeightedGraph& graph) {
  LevelGraph level;
  const std::size_t n = graph.node_count();
  level.adjacency.resize(n);
  level.self_loop.assign(n, 0.0);
  level.degree.assign(n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& nb : graph.neighbors(i)) level.adjacency[i].push_back({nb.node, nb.weight});
    level.degree[i] = graph.weighted_degree(i);
    level.two_m += level.degree[i];
  }
  return level;
}

// One pass of local moves over shuffled nodes; returns true if any node moved.
// `community`, `community_total` are updated in place.
bool local_move_pass(const LevelGraph& level, double resolution, Rng& rng,
                     std::vector<std::uint32_t>& community, std::vector<double>& community_total) {
  const std::size_t n = level.size();
  std::vector<std::uint32_t> visit(n);
  std::iota(visit.begin(), visit.end(), 0);
  rng.shuffle(visit);

  // Scratch: weight from the current node to each candidate community.
  std::vector<double> weight_to(n, 0.0);
  std::vector<std::uint32_t> touched;

  bool moved_any = false;
  for (std::uint32_t node : visit) {
    const std::uint32_t home = community[node];
    touched.clear();
    weight_to[home] = 0.0;
    touched.push_back(home);
    for (const auto& [nb, w] : level.adjacency[node]) {
      const std::uint32_t c = community[nb];
      if (weight_to[c] == 0.0 && c != home) touched.push_back(c);
      weight_to[c] += w;
    }

    // Detach the node; gains are then comparable across all candidates.
    community_total[home] -= level.degree[node];

    const double k = level.degree[node];
    const double scale = resolution * k / level.two_m;
    std::uint32_t best_community = home;
    double best_gain = weight_to[home] - scale * community_total[home];
    for (std::uint32_t c : touched) {
      if (c == home) continue;
      const double gain = weight_to[c] - scale * community_total[c];
      // Move only on a strict gain over staying; equal-gain alternatives
      // resolve to the lowest community index.
      if (gain > best_gain ||
          (gain == best_gain && best_community != home && c < best_community)) {
        best_gain = gain;
        best_community = c;
      }
    }

    community_total[best_community] += level.degree[node];
    if (best_community != home) {
      community[node] = best_community;
      moved_any = true;
    }
    for (std::uint32_t c : touched) weight_to[c] = 0.0;
  }
  return moved_any;
}

// Q at the given resolution from community aggregates of the level graph.
double level_modularity(const LevelGraph& level, double resolution,
                        const std::vector<std::uint32_t>& community) {
  std::size_t c_max = 0;
  for (auto c : community) c_max = std::max<std::size_t>(c_max, c + 1);
  std::vector<double> internal(c_max, 0.0), total(c_max, 0.0);
  for (std::uint32_t i = 0; i < level.size(); ++i) {
    total[community[i]] += level.degree[i];
    internal[community[i]] += 2.0 * level.self_loop[i];
    for (const auto& [nb, w] : level.adjacency[i])
      if (community[nb] == community[i]) internal[community[i]] += w;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < c_max; ++c) {
    const double frac = total[c] / level.two_m;
    q += internal[c] / level.two_m - resolution * frac * frac;
  }
  return q;
}

// Collapse communities into super-nodes; `community` must be canonical.
LevelGraph aggregate(const LevelGraph& level, const std::vector<std::uint32_t>& community,
                     std::size_t community_count) {
  LevelGraph next;
  next.adjacency.resize(community_count);
  next.self_loop.assign(community_count, 0.0);
  next.degree.assign(community_count, 0.0);
  next.two_m = level.two_m;

  std::vector<double> row(community_count, 0.0);
  std::vector<std::vector<std::uint32_t>> members(community_count);
  for (std::uint32_t i = 0; i < level.size(); ++i) members[community[i]].push_back(i);

  for (std::uint32_t c = 0; c < community_count; ++c) {
    std::vector<std::uint32_t> touched;
    double self = 0.0;
    for (std::uint32_t node : members[c]) {
      self += level.self_loop[node];
      next.degree[c] += level.degree[node];
      for (const auto& [nb, w] : level.adjacency[node]) {
        const std::uint32_t nc = community[nb];
        if (nc == c) {
          self += w * 0.5;  // each internal edge seen from both sides
        } else {
          if (row[nc] == 0.0) touched.push_back(nc);
          row[nc] += w;
        }
      }
    }
    next.self_loop[c] = self;
    std::sort(touched.begin(), touched.end());
    for (std::uint32_t nc : touched) {
      next.adjacency[c].push_back({nc, row[nc]});
      row[nc] = 0.0;
    }
  }
  return next;
}

std::size_t canonicalize_labels(std::vector<std::uint32_t>& labels) {
  std::vector<std::uint32_t> remap(labels.size(), UINT32_MAX);
  std::uint32_t next = 0;
  for (auto& l : labels) {
    if (remap[l] == UINT32_MAX) remap[l] = next++;
    l = remap[l];
  }
  return next;
}

}  // namespace

CommunityReport louvain(const WeightedGraph& graph, const AlgorithmParams& params) {
  detail::require_nonempty(graph, "louvain");
  Rng rng(params.seed);

  LevelGraph level = make_level(graph);
  // node -> community of the original graph, refined level by level
  std::vector<std::uint32_t> assignment(graph.node_count());
  std::iota(assignment.begin(), assignment.end(), 0);

  CommunityReport report;
  report.algorithm = algorithm_name(Algorithm::louvain);
  report.params = params;

  while (true) {
    std::vector<std::uint32_t> community(level.size());
    std::iota(community.begin(), community.end(), 0);
    std::vector<double> community_total(level.degree);

    bool improved = false;
    while (local_move_pass(level, params.resolution, rng, community, community_total))
      improved = true;

    const std::size_t community_count = canonicalize_labels(community);
    report.quality_trace.push_back(level_modularity(level, params.resolution, community));

    for (auto& a : assignment) a = community[a];
    if (!improved || community_count == level.size()) break;
    level = aggregate(level, community, community_count);
  }

  report.partition = Partition(std::move(assignment));
  detail::finalize_report(graph, report);
  return report;
}

}  // namespace copref
