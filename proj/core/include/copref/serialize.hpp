#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "copref/community.hpp"
#include "copref/graph.hpp"
#include "copref/projection.hpp"

namespace copref {

/// GraphML 1.0, undirected: node attributes `name` (string) and, when a
/// partition is given, `community` (int); edge attributes `weight` (double,
/// shortest round-trip form) and `raw_count` (int). Node and edge ordering is
/// stable, so identical inputs serialize byte-identically.
void write_graphml(const CoPreferenceGraph& graph, const Partition* partition,
                   const std::string& path);

struct GraphmlData {
  CoPreferenceGraph graph;
  std::optional<Partition> partition;  // present when community data was embedded
};

/// Reads GraphML produced by write_graphml (exact round-trip).
/// Throws input_error on malformed input.
GraphmlData read_graphml(const std::string& path);

/// Rows `community_id,perfume_id,perfume_name` sorted by (community_id,
/// perfume_id), plus a companion summary file carrying
/// `algorithm,variant,category,modularity,communities`.
void write_communities_csv(const CoPreferenceGraph& graph, const CommunityReport& report,
                           const std::string& rows_path, const std::string& summary_path);

/// item id -> community label, as written by write_communities_csv.
std::vector<std::pair<std::string, std::uint32_t>> read_communities_csv(const std::string& path);

/// DOT graph with community-indexed fill colors from a 32-color cycle.
void write_dot(const CoPreferenceGraph& graph, const Partition& partition,
               const std::string& path);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

}  // namespace copref
