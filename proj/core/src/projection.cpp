#include "copref/projection.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>

#include "copref/csv.hpp"
#include "copref/errors.hpp"

namespace copref {

namespace {

std::string with_prefix(const std::string& raw, const char* prefix) {
  if (raw.compare(0, std::string::traits_type::length(prefix), prefix) == 0) return raw;
  return prefix + raw;
}

}  // namespace

void ItemRatings::set(const std::string& item_id, Category category, double avg_rating,
                      int vote_count) {
  if (avg_rating < 0.0 || avg_rating > 10.0)
    throw std::invalid_argument("rating outside [0,10]");
  const int c = static_cast<int>(category);
  Entry& e = entries_[item_id];
  if (e.avg[c]) {  // replacing an existing rating: back out the old mean term
    sum_[c] -= *e.avg[c];
    --count_[c];
  }
  e.avg[c] = avg_rating;
  e.votes[c] = vote_count;
  sum_[c] += avg_rating;
  ++count_[c];
}

std::optional<double> ItemRatings::rating(const std::string& item_id, Category category) const {
  auto it = entries_.find(item_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second.avg[static_cast<int>(category)];
}

std::optional<int> ItemRatings::vote_count(const std::string& item_id, Category category) const {
  auto it = entries_.find(item_id);
  if (it == entries_.end()) return std::nullopt;
  const int c = static_cast<int>(category);
  if (!it->second.avg[c]) return std::nullopt;
  return it->second.votes[c];
}

std::optional<double> ItemRatings::global_mean(Category category) const {
  const int c = static_cast<int>(category);
  if (count_[c] == 0) return std::nullopt;
  return sum_[c] / static_cast<double>(count_[c]);
}

ItemRatings ItemRatings::load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open ratings: " + path);
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw input_error("empty ratings file: " + path);

  ItemRatings ratings;
  while (reader.next(row)) {
    const std::size_t line = reader.record_line();
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() < 4) throw input_error("malformed ratings row at line " + std::to_string(line));
    const auto category = parse_category(row[1]);
    if (!category)
      throw input_error("unknown category '" + row[1] + "' at line " + std::to_string(line));
    try {
      ratings.set(with_prefix(row[0], "perfume_"), *category, std::stod(row[2]),
                  std::stoi(row[3]));
    } catch (const std::exception&) {
      throw input_error("malformed ratings row at line " + std::to_string(line));
    }
  }
  return ratings;
}

void CoPreferenceGraph::add_item(const std::string& item_id, const std::string& display_name) {
  if (display_name.empty()) graph_.add_node(item_id);
  else graph_.add_node(item_id, display_name);
}

void CoPreferenceGraph::add_edge(std::uint32_t a, std::uint32_t b, double weight, int raw_count) {
  if (raw_count < 1) throw std::invalid_argument("raw count must be >= 1");
  graph_.add_edge(a, b, weight);
  if (a > b) std::swap(a, b);
  counts_[key(a, b)] = raw_count;
}

int CoPreferenceGraph::raw_count(std::uint32_t a, std::uint32_t b) const {
  if (a > b) std::swap(a, b);
  auto it = counts_.find(key(a, b));
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t CoPreferenceGraph::key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

CoPreferenceGraph project_bipartite(const BipartiteGraph& bipartite) {
  CoPreferenceGraph out;
  for (std::uint32_t i = 0; i < bipartite.item_count(); ++i)
    out.add_item(bipartite.items()[i], bipartite.item_name(i));

  // Off-diagonal of A^T A: count users incident to both endpoints.
  std::vector<std::vector<std::uint32_t>> items_of_user(bipartite.user_count());
  for (const auto& [u, v] : bipartite.incidences()) items_of_user[u].push_back(v);

  std::unordered_map<std::uint64_t, int> counts;
  for (auto& items : items_of_user) {
    std::sort(items.begin(), items.end());
    for (std::size_t x = 0; x < items.size(); ++x)
      for (std::size_t y = x + 1; y < items.size(); ++y) {
        const std::uint64_t key =
            (static_cast<std::uint64_t>(items[x]) << 32) | items[y];
        ++counts[key];
      }
  }

  std::vector<std::uint64_t> keys;
  keys.reserve(counts.size());
  for (const auto& [k, c] : counts) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (std::uint64_t k : keys) {
    const auto a = static_cast<std::uint32_t>(k >> 32);
    const auto b = static_cast<std::uint32_t>(k & 0xffffffffu);
    const int c = counts[k];
    out.add_edge(a, b, static_cast<double>(c), c);
  }
  return out;
}

CoPreferenceGraph blend_weights(const CoPreferenceGraph& graph, const ItemRatings& ratings,
                                Category category, double rating_coeff, double count_coeff) {
  if (rating_coeff < 0.0 || count_coeff < 0.0)
    throw std::invalid_argument("blend coefficients must be non-negative");

  const auto& g = graph.graph();
  std::set<std::string> warned;
  auto rating_of = [&](std::uint32_t idx) -> double {
    const std::string& item = g.node_id(idx);
    if (auto r = ratings.rating(item, category)) return *r;
    const auto mean = ratings.global_mean(category);
    if (!mean)
      throw input_error(std::string("no ratings available for category ") +
                        category_name(category));
    if (warned.insert(item).second)
      std::cerr << "warning: no " << category_name(category) << " rating for " << item
                << ", substituting category mean " << *mean << "\n";
    return *mean;
  };

  CoPreferenceGraph out;
  for (std::uint32_t i = 0; i < g.node_count(); ++i)
    out.add_item(g.node_id(i), g.display_name(i));
  for (const auto& e : g.edges()) {
    const int c = graph.raw_count(e.a, e.b);
    const double w = rating_coeff * rating_of(e.a) + rating_coeff * rating_of(e.b) +
                     count_coeff * static_cast<double>(c);
    if (w > 0.0) out.add_edge(e.a, e.b, w, c);
  }
  return out;
}

CoPreferenceGraph filter_edges(const CoPreferenceGraph& graph, double min_weight,
                               EdgeFilterMode mode) {
  const auto& g = graph.graph();
  CoPreferenceGraph out;
  for (std::uint32_t i = 0; i < g.node_count(); ++i)
    out.add_item(g.node_id(i), g.display_name(i));
  for (const auto& e : g.edges()) {
    const int c = graph.raw_count(e.a, e.b);
    const double filtered = mode == EdgeFilterMode::blended ? e.weight : static_cast<double>(c);
    if (filtered > min_weight) out.add_edge(e.a, e.b, e.weight, c);
  }
  return out;
}

CoPreferenceGraph prune_isolated(const CoPreferenceGraph& graph) {
  const auto& g = graph.graph();
  std::vector<std::uint32_t> remap(g.node_count(), UINT32_MAX);
  CoPreferenceGraph out;
  for (std::uint32_t i = 0; i < g.node_count(); ++i) {
    if (g.degree(i) == 0) continue;
    remap[i] = static_cast<std::uint32_t>(out.node_count());
    out.add_item(g.node_id(i), g.display_name(i));
  }
  for (const auto& e : g.edges())
    out.add_edge(remap[e.a], remap[e.b], e.weight, graph.raw_count(e.a, e.b));
  return out;
}

CoPreferenceGraph normalize_weights(const CoPreferenceGraph& graph) {
  const auto& g = graph.graph();
  // Degrees snapshotted before any rescale; edge counts, not weights.
  std::vector<double> degree(g.node_count());
  for (std::uint32_t i = 0; i < g.node_count(); ++i)
    degree[i] = static_cast<double>(g.degree(i));

  CoPreferenceGraph out;
  for (std::uint32_t i = 0; i < g.node_count(); ++i)
    out.add_item(g.node_id(i), g.display_name(i));
  for (const auto& e : g.edges())
    out.add_edge(e.a, e.b, e.weight / (degree[e.a] * degree[e.b]), graph.raw_count(e.a, e.b));
  return out;
}

}  // namespace copref
