#include "copref/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "copref/errors.hpp"

namespace copref {

WeightedGraph::NodeIndex WeightedGraph::add_node(const std::string& id) {
  auto it = index_.find(id);
  if (it != index_.end()) return it->second;
  NodeIndex idx = static_cast<NodeIndex>(ids_.size());
  ids_.push_back(id);
  display_names_.emplace_back();
  adjacency_.emplace_back();
  weighted_degree_.push_back(0.0);
  index_.emplace(id, idx);
  return idx;
}

WeightedGraph::NodeIndex WeightedGraph::add_node(const std::string& id,
                                                 const std::string& display_name) {
  NodeIndex idx = add_node(id);
  display_names_[idx] = display_name;
  return idx;
}

void WeightedGraph::add_edge(const std::string& a, const std::string& b, double weight) {
  add_edge(add_node(a), add_node(b), weight);
}

void WeightedGraph::add_edge(NodeIndex a, NodeIndex b, double weight) {
  if (a == b) throw std::invalid_argument("self-loops are not allowed");
  if (!(weight > 0.0)) throw std::invalid_argument("edge weight must be positive");
  if (a >= ids_.size() || b >= ids_.size()) throw std::invalid_argument("node index out of range");
  if (a > b) std::swap(a, b);
  auto [it, inserted] = edge_weight_.emplace(pair_key(a, b), weight);
  if (!inserted) throw std::invalid_argument("duplicate edge " + ids_[a] + " -- " + ids_[b]);
  edges_.push_back({a, b, weight});
  adjacency_[a].push_back({b, weight});
  adjacency_[b].push_back({a, weight});
  weighted_degree_[a] += weight;
  weighted_degree_[b] += weight;
  total_weight_ += weight;
}

std::optional<WeightedGraph::NodeIndex> WeightedGraph::find_node(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WeightedGraph::NodeIndex WeightedGraph::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::invalid_argument("node not found: " + id);
  return it->second;
}

const std::string& WeightedGraph::display_name(NodeIndex idx) const {
  return display_names_[idx].empty() ? ids_[idx] : display_names_[idx];
}

void WeightedGraph::set_display_name(NodeIndex idx, const std::string& name) {
  display_names_[idx] = name;
}

double WeightedGraph::edge_weight(NodeIndex a, NodeIndex b) const {
  if (a > b) std::swap(a, b);
  auto it = edge_weight_.find(pair_key(a, b));
  return it == edge_weight_.end() ? 0.0 : it->second;
}

bool WeightedGraph::has_edge(NodeIndex a, NodeIndex b) const {
  if (a > b) std::swap(a, b);
  return edge_weight_.count(pair_key(a, b)) != 0;
}

std::uint64_t WeightedGraph::pair_key(NodeIndex a, NodeIndex b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::size_t Partition::community_count() const {
  if (labels_.empty()) return 0;
  std::vector<std::uint32_t> seen(labels_);
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  return seen.size();
}

Partition canonicalize_partition(const Partition& partition) {
  std::vector<std::uint32_t> relabeled(partition.size());
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    auto [it, inserted] = remap.emplace(partition.label(i), next);
    if (inserted) ++next;
    relabeled[i] = it->second;
  }
  return Partition(std::move(relabeled));
}

double modularity(const WeightedGraph& graph, const Partition& partition, ModularityMode mode) {
  if (graph.empty()) throw algorithm_error("modularity undefined: empty graph");
  if (partition.size() != graph.node_count())
    throw std::invalid_argument("partition does not cover the graph");

  const Partition canon = canonicalize_partition(partition);
  const std::size_t c = canon.community_count();

  // Per-community form: Q = sum_c [ in_c/2m - (tot_c/2m)^2 ], where in_c is
  // twice the internal weight of community c and tot_c its total degree.
  std::vector<double> internal(c, 0.0);
  std::vector<double> total(c, 0.0);
  double m = 0.0;
  const bool binary = (mode == ModularityMode::binarized);
  for (const auto& e : graph.edges()) {
    const double w = binary ? 1.0 : e.weight;
    m += w;
    total[canon.label(e.a)] += w;
    total[canon.label(e.b)] += w;
    if (canon.label(e.a) == canon.label(e.b)) internal[canon.label(e.a)] += 2.0 * w;
  }
  if (!(m > 0.0)) throw algorithm_error("modularity undefined: total weight is zero");

  const double two_m = 2.0 * m;
  std::vector<double> terms(c);
  for (std::size_t i = 0; i < c; ++i) {
    const double frac = total[i] / two_m;
    terms[i] = internal[i] / two_m - frac * frac;
  }
  // Fixed summation order, independent of community labeling.
  std::sort(terms.begin(), terms.end());
  double q = 0.0;
  for (double t : terms) q += t;
  return q;
}

double normalized_mutual_information(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) throw std::invalid_argument("partitions cover different node sets");
  const std::size_t n = a.size();
  if (n == 0) throw std::invalid_argument("empty partitions");

  const Partition ca = canonicalize_partition(a);
  const Partition cb = canonicalize_partition(b);
  const std::size_t ka = ca.community_count();
  const std::size_t kb = cb.community_count();

  std::vector<double> pa(ka, 0.0), pb(kb, 0.0);
  std::vector<std::vector<double>> joint(ka, std::vector<double>(kb, 0.0));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[ca.label(i)] += inv_n;
    pb[cb.label(i)] += inv_n;
    joint[ca.label(i)][cb.label(i)] += inv_n;
  }

  double h_a = 0.0, h_b = 0.0, mi = 0.0;
  for (double p : pa)
    if (p > 0.0) h_a -= p * std::log(p);
  for (double p : pb)
    if (p > 0.0) h_b -= p * std::log(p);
  for (std::size_t x = 0; x < ka; ++x)
    for (std::size_t y = 0; y < kb; ++y) {
      const double p = joint[x][y];
      if (p > 0.0) mi += p * std::log(p / (pa[x] * pb[y]));
    }

  if (h_a + h_b == 0.0) return 1.0;  // both partitions trivial
  return 2.0 * mi / (h_a + h_b);
}

}  // namespace copref
