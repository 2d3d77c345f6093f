#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "copref/graph.hpp"
#include "copref/ingest.hpp"

namespace copref {

/// Per-item category-average ratings (R_j) with vote counts.
class ItemRatings {
public:
  void set(const std::string& item_id, Category category, double avg_rating, int vote_count);

  std::optional<double> rating(const std::string& item_id, Category category) const;
  std::optional<int> vote_count(const std::string& item_id, Category category) const;

  /// Mean of the per-item averages for a category; nullopt when no item has
  /// a rating there.
  std::optional<double> global_mean(Category category) const;

  std::size_t item_count() const { return entries_.size(); }

  /// CSV with header perfume_id,category,avg_rating,vote_count. Item ids are
  /// prefixed the same way review ids are.
  static ItemRatings load_csv(const std::string& path);

private:
  struct Entry {
    std::optional<double> avg[4];
    int votes[4] = {0, 0, 0, 0};
  };
  std::unordered_map<std::string, Entry> entries_;
  double sum_[4] = {0, 0, 0, 0};
  std::size_t count_[4] = {0, 0, 0, 0};
};

/// Weighted undirected item-item graph; every edge keeps the raw
/// co-preference count C_jk next to its (possibly blended or normalized)
/// weight W_jk.
class CoPreferenceGraph {
public:
  WeightedGraph& graph() { return graph_; }
  const WeightedGraph& graph() const { return graph_; }

  void add_item(const std::string& item_id, const std::string& display_name = "");
  /// Adds an edge with raw count and weight; indices refer to graph nodes.
  void add_edge(std::uint32_t a, std::uint32_t b, double weight, int raw_count);

  int raw_count(std::uint32_t a, std::uint32_t b) const;

  std::size_t node_count() const { return graph_.node_count(); }
  std::size_t edge_count() const { return graph_.edge_count(); }

private:
  static std::uint64_t key(std::uint32_t a, std::uint32_t b);
  WeightedGraph graph_;
  std::unordered_map<std::uint64_t, int> counts_;
};

/// One-mode projection P = A^T A of the bipartite graph with the diagonal
/// (self-loops) removed: items j,k are linked with C_jk = number of users
/// incident to both, and the edge weight starts out equal to C_jk. Items
/// with no co-preference stay as isolated nodes until pruned.
CoPreferenceGraph project_bipartite(const BipartiteGraph& bipartite);

/// Replaces every edge weight with
///   rating_coeff * R_j + rating_coeff * R_k + count_coeff * C_jk
/// for the chosen category. Items without a rating get the category's global
/// mean substituted (with a warning on stderr). Raw counts are unchanged;
/// a non-positive blended weight drops the edge.
CoPreferenceGraph blend_weights(const CoPreferenceGraph& graph, const ItemRatings& ratings,
                                Category category, double rating_coeff = 0.6,
                                double count_coeff = 0.4);

enum class EdgeFilterMode {
  blended,    // threshold applies to the edge weight W
  raw_count,  // threshold applies to the raw count C
};

/// Removes edges whose filtered quantity is <= min_weight.
CoPreferenceGraph filter_edges(const CoPreferenceGraph& graph, double min_weight = 3.0,
                               EdgeFilterMode mode = EdgeFilterMode::blended);

/// Removes all degree-zero nodes.
CoPreferenceGraph prune_isolated(const CoPreferenceGraph& graph);

/// Divides each edge weight by the product of its endpoints' unweighted
/// degrees, all degrees snapshotted before any division.
CoPreferenceGraph normalize_weights(const CoPreferenceGraph& graph);

}  // namespace copref
