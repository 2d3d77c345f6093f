#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace copref {

/// Undirected weighted graph over opaque string node ids.
///
/// Each undirected edge is stored once (lower index first) and mirrored in the
/// per-node adjacency. Edge weights are strictly positive and self-loops are
/// rejected. Instances are treated as immutable once construction is done and
/// are then safe to share across threads.
class WeightedGraph {
public:
  using NodeIndex = std::uint32_t;

  struct Edge {
    NodeIndex a, b;  // a < b
    double weight;
  };
  struct Neighbor {
    NodeIndex node;
    double weight;
  };

  /// Adds a node if absent; returns its index either way.
  NodeIndex add_node(const std::string& id);
  NodeIndex add_node(const std::string& id, const std::string& display_name);

  /// Adds an undirected edge. Nodes are created on demand.
  /// Throws std::invalid_argument on self-loops, non-positive weights,
  /// or duplicate edges.
  void add_edge(const std::string& a, const std::string& b, double weight);
  void add_edge(NodeIndex a, NodeIndex b, double weight);

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return ids_.empty(); }

  std::optional<NodeIndex> find_node(const std::string& id) const;
  /// Throws std::invalid_argument("node not found") for unknown ids.
  NodeIndex index_of(const std::string& id) const;
  bool has_node(const std::string& id) const { return find_node(id).has_value(); }

  const std::string& node_id(NodeIndex idx) const { return ids_[idx]; }
  /// Display name if one was set, otherwise the node id.
  const std::string& display_name(NodeIndex idx) const;
  void set_display_name(NodeIndex idx, const std::string& name);

  /// Sum of incident edge weights.
  double weighted_degree(NodeIndex idx) const { return weighted_degree_[idx]; }
  double weighted_degree(const std::string& id) const { return weighted_degree_[index_of(id)]; }
  /// Number of incident edges.
  std::size_t degree(NodeIndex idx) const { return adjacency_[idx].size(); }

  /// Total graph weight m (each undirected edge counted once).
  double total_weight() const { return total_weight_; }

  /// Weight of edge (a,b), or 0 if absent.
  double edge_weight(NodeIndex a, NodeIndex b) const;
  bool has_edge(NodeIndex a, NodeIndex b) const;

  const std::vector<Neighbor>& neighbors(NodeIndex idx) const { return adjacency_[idx]; }
  const std::vector<Edge>& edges() const { return edges_; }

private:
  static std::uint64_t pair_key(NodeIndex a, NodeIndex b);

  std::vector<std::string> ids_;
  std::vector<std::string> display_names_;  // empty string = unset
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, double> edge_weight_;
  std::vector<double> weighted_degree_;
  double total_weight_ = 0.0;
};

/// Total assignment of graph nodes (by index) to community labels.
class Partition {
public:
  Partition() = default;
  explicit Partition(std::vector<std::uint32_t> labels) : labels_(std::move(labels)) {}

  std::size_t size() const { return labels_.size(); }
  std::uint32_t label(std::size_t node) const { return labels_[node]; }
  std::uint32_t& label(std::size_t node) { return labels_[node]; }
  const std::vector<std::uint32_t>& labels() const { return labels_; }

  /// Number of distinct labels.
  std::size_t community_count() const;

  bool operator==(const Partition& other) const { return labels_ == other.labels_; }

private:
  std::vector<std::uint32_t> labels_;
};

/// Relabels communities to 0..c-1 in order of first appearance over the node
/// ordering. Modularity is unchanged by relabeling.
Partition canonicalize_partition(const Partition& partition);

enum class ModularityMode {
  weighted,   // A_ij = edge weight, k = weighted degree, m = total weight
  binarized,  // A_ij = 1 for present edges, k = edge count, m = edge count
};

/// Newman-Girvan modularity Q of a partition. Throws algorithm_error
/// ("modularity undefined") on an empty graph or total weight zero, and
/// std::invalid_argument if the partition does not cover the graph.
///
/// The per-community terms are summed in value order, so Q is exactly
/// invariant under node/community relabeling whenever the community
/// aggregates are exact (e.g. dyadic weights).
double modularity(const WeightedGraph& graph, const Partition& partition,
                  ModularityMode mode = ModularityMode::weighted);

/// Normalized mutual information between two partitions of the same node set;
/// 1 means identical up to relabeling. By convention two trivial
/// single-community partitions score 1.
double normalized_mutual_information(const Partition& a, const Partition& b);

}  // namespace copref
