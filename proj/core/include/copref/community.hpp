#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "copref/graph.hpp"

namespace copref {

enum class Algorithm { louvain = 0, fast_greedy, walktrap, spinglass, spectral };

const char* algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string name);

struct AnnealSchedule {
  double start_temperature = 1.0;
  double cooling = 0.99;   // geometric factor per sweep
  int max_sweeps = 300;
  double min_acceptance = 0.001;  // stop below this acceptance rate
};

enum class LaplacianKind {
  standard,     // L = D - W
  random_walk,  // L_rw = I - D^{-1} W
};

struct AlgorithmParams {
  Algorithm algorithm = Algorithm::louvain;
  double resolution = 1.0;                 // Louvain null-model scaling
  double gamma = 1.0;                      // Spinglass resolution
  int walk_length = 4;                     // Walktrap t
  int spin_states = 25;                    // Spinglass state cap
  std::optional<std::size_t> k_clusters;   // Spectral; eigengap heuristic when absent
  LaplacianKind laplacian = LaplacianKind::standard;
  std::uint64_t seed = 0;
  AnnealSchedule anneal;

  /// Throws std::invalid_argument when a parameter is outside its range.
  void validate() const;
};

struct CommunityReport {
  std::string algorithm;
  AlgorithmParams params;
  std::string variant;   // filled by the pipeline
  std::string category;  // filled by the pipeline ("all" for the primary net)
  Partition partition;   // canonical
  double modularity_q = 0.0;
  std::size_t community_count = 0;
  double duration_seconds = 0.0;
  /// Quality trail: Q after each phase (Louvain) or each merge (agglomerative
  /// methods, starting from the singleton state).
  std::vector<double> quality_trace;
};

// The five detectors. Each returns a canonical, total partition with the
// weighted modularity of the result; all are deterministic given the seed.
// All throw algorithm_error on an empty or edgeless graph.
CommunityReport louvain(const WeightedGraph& graph, const AlgorithmParams& params);
CommunityReport fast_greedy(const WeightedGraph& graph, const AlgorithmParams& params);
CommunityReport walktrap(const WeightedGraph& graph, const AlgorithmParams& params);
CommunityReport spinglass(const WeightedGraph& graph, const AlgorithmParams& params);
CommunityReport spectral(const WeightedGraph& graph, const AlgorithmParams& params);

/// Dispatch on params.algorithm; validates parameters and fills the report's
/// algorithm name and wall-clock duration.
CommunityReport detect(const WeightedGraph& graph, const AlgorithmParams& params);

namespace detail {
/// Connected components by index; returns component label per node.
std::vector<std::uint32_t> connected_components(const WeightedGraph& graph);
/// Shared finalization: canonicalize, score, count.
void finalize_report(const WeightedGraph& graph, CommunityReport& report);
/// Throws algorithm_error for empty or edgeless graphs.
void require_nonempty(const WeightedGraph& graph, const char* algorithm);
}  // namespace detail

}  // namespace copref
