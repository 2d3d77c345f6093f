#include <chrono>
#include <stdexcept>

#include "copref/community.hpp"
#include "copref/errors.hpp"

namespace copref {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::louvain: return "louvain";
    case Algorithm::fast_greedy: return "fastgreedy";
    case Algorithm::walktrap: return "walktrap";
    case Algorithm::spinglass: return "spinglass";
    case Algorithm::spectral: return "spectral";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(std::string name) {
  for (char& c : name)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (name == "louvain") return Algorithm::louvain;
  if (name == "fastgreedy" || name == "fast_greedy" || name == "fast-greedy")
    return Algorithm::fast_greedy;
  if (name == "walktrap") return Algorithm::walktrap;
  if (name == "spinglass") return Algorithm::spinglass;
  if (name == "spectral") return Algorithm::spectral;
  return std::nullopt;
}

void AlgorithmParams::validate() const {
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (walk_length < 1) throw std::invalid_argument("walk length must be >= 1");
  if (spin_states < 2) throw std::invalid_argument("spin states must be >= 2");
  if (k_clusters && *k_clusters < 1) throw std::invalid_argument("k must be >= 1");
  if (!(anneal.start_temperature > 0.0))
    throw std::invalid_argument("start temperature must be > 0");
  if (!(anneal.cooling > 0.0 && anneal.cooling < 1.0))
    throw std::invalid_argument("cooling factor must lie in (0,1)");
  if (anneal.max_sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
}

CommunityReport detect(const WeightedGraph& graph, const AlgorithmParams& params) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  CommunityReport report;
  switch (params.algorithm) {
    case Algorithm::louvain: report = louvain(graph, params); break;
    case Algorithm::fast_greedy: report = fast_greedy(graph, params); break;
    case Algorithm::walktrap: report = walktrap(graph, params); break;
    case Algorithm::spinglass: report = spinglass(graph, params); break;
    case Algorithm::spectral: report = spectral(graph, params); break;
  }
  report.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace detail {

std::vector<std::uint32_t> connected_components(const WeightedGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<std::uint32_t> component(n, UINT32_MAX);
  std::uint32_t next = 0;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t start = 0; start < n; ++start) {
    if (component[start] != UINT32_MAX) continue;
    component[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::uint32_t u = stack.back();
      stack.pop_back();
      for (const auto& nb : graph.neighbors(u)) {
        if (component[nb.node] == UINT32_MAX) {
          component[nb.node] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return component;
}

void finalize_report(const WeightedGraph& graph, CommunityReport& report) {
  report.partition = canonicalize_partition(report.partition);
  report.modularity_q = modularity(graph, report.partition);
  report.community_count = report.partition.community_count();
}

void require_nonempty(const WeightedGraph& graph, const char* algorithm) {
  if (graph.empty()) throw algorithm_error(std::string(algorithm) + ": empty graph");
  if (graph.edge_count() == 0)
    throw algorithm_error(std::string(algorithm) + ": graph has no edges");
}

}  // namespace detail

}  // namespace copref
