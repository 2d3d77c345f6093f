#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "copref/community.hpp"
#include "copref/errors.hpp"
#include "copref/rng.hpp"

namespace copref {

namespace {

// Anneals one connected component (given by node indices into the graph).
// Minimizes the Reichardt-Bornholdt Hamiltonian with configuration null model
//   H = -sum_{i<j} (W_ij - gamma * k_i k_j / 2m) * [s_i == s_j]
// where the degrees and 2m are taken within the component. Returns spin
// states per component node.
std::vector<std::uint32_t> anneal_component(const WeightedGraph& graph,
                                            const std::vector<std::uint32_t>& nodes,
                                            const AlgorithmParams& params, Rng& rng) {
  const std::size_t n = nodes.size();
  const std::size_t q = std::min<std::size_t>(params.spin_states, std::max<std::size_t>(n, 2));

  std::vector<std::uint32_t> local_index(graph.node_count(), UINT32_MAX);
  for (std::uint32_t i = 0; i < n; ++i) local_index[nodes[i]] = i;

  std::vector<double> degree(n);
  double two_m = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    degree[i] = graph.weighted_degree(nodes[i]);
    two_m += degree[i];
  }
  if (two_m == 0.0) return std::vector<std::uint32_t>(n, 0);  // isolated node

  std::vector<std::uint32_t> spin(n);
  for (std::uint32_t i = 0; i < n; ++i) spin[i] = static_cast<std::uint32_t>(rng.uniform_index(q));

  // Degree mass per spin state keeps the null-model term O(1) per proposal.
  std::vector<double> state_degree(q, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) state_degree[spin[i]] += degree[i];

  // Energy change of flipping node i from its spin to `target`:
  //   dH = (links_to_current - gamma * k_i * (K_current - k_i) / 2m)
  //      - (links_to_target  - gamma * k_i * K_target / 2m)
  auto links_to = [&](std::uint32_t i, std::uint32_t state) {
    double w = 0.0;
    for (const auto& nb : graph.neighbors(nodes[i])) {
      const std::uint32_t j = local_index[nb.node];
      if (spin[j] == state) w += nb.weight;
    }
    return w;
  };
  auto delta_h = [&](std::uint32_t i, std::uint32_t target) {
    const std::uint32_t cur = spin[i];
    const double k = degree[i];
    const double stay = links_to(i, cur) - params.gamma * k * (state_degree[cur] - k) / two_m;
    const double move = links_to(i, target) - params.gamma * k * state_degree[target] / two_m;
    return stay - move;
  };
  auto apply = [&](std::uint32_t i, std::uint32_t target) {
    state_degree[spin[i]] -= degree[i];
    state_degree[target] += degree[i];
    spin[i] = target;
  };

  std::vector<std::uint32_t> visit(n);
  std::iota(visit.begin(), visit.end(), 0);

  // The schedule is dimensionless: temperatures are expressed in units of the
  // component's mean per-node edge mass (m/n), so annealing behaves the same
  // whether weights are raw counts or degree-normalized fractions.
  const double energy_scale = two_m / (2.0 * static_cast<double>(n));
  double temperature = params.anneal.start_temperature * energy_scale;
  for (int sweep = 0; sweep < params.anneal.max_sweeps; ++sweep) {
    rng.shuffle(visit);
    std::size_t accepted = 0;
    for (std::uint32_t i : visit) {
      // Propose a uniformly random different state.
      std::uint32_t target = static_cast<std::uint32_t>(rng.uniform_index(q - 1));
      if (target >= spin[i]) ++target;
      const double dh = delta_h(i, target);
      if (dh <= 0.0 || rng.uniform_real() < std::exp(-dh / temperature)) {
        apply(i, target);
        ++accepted;
      }
    }
    temperature *= params.anneal.cooling;
    if (static_cast<double>(accepted) < params.anneal.min_acceptance * static_cast<double>(n))
      break;
  }

  // Zero-temperature polish: greedy best-move descent to the local optimum.
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::uint32_t i = 0; i < n; ++i) {
      std::uint32_t best_state = spin[i];
      double best_dh = 0.0;
      for (std::uint32_t s = 0; s < q; ++s) {
        if (s == spin[i]) continue;
        const double dh = delta_h(i, s);
        if (dh < best_dh || (dh == best_dh && best_state != spin[i] && s < best_state)) {
          best_dh = dh;
          best_state = s;
        }
      }
      if (best_state != spin[i] && best_dh < 0.0) {
        apply(i, best_state);
        improved = true;
      }
    }
  }
  return spin;
}

}  // namespace

// Potts-model community detection. Disconnected graphs are handled per
// connected component with disjoint label ranges.
CommunityReport spinglass(const WeightedGraph& graph, const AlgorithmParams& params) {
  detail::require_nonempty(graph, "spinglass");
  const std::size_t n = graph.node_count();

  const auto component = detail::connected_components(graph);
  std::uint32_t component_count = 0;
  for (auto c : component) component_count = std::max(component_count, c + 1);
  std::vector<std::vector<std::uint32_t>> members(component_count);
  for (std::uint32_t i = 0; i < n; ++i) members[component[i]].push_back(i);

  Rng rng(params.seed);
  std::vector<std::uint32_t> label(n, 0);
  std::uint32_t label_base = 0;
  for (std::uint32_t c = 0; c < component_count; ++c) {
    const auto spins = anneal_component(graph, members[c], params, rng);
    // Compact the spin states that are actually used, then offset them so
    // components never share labels.
    std::vector<std::uint32_t> remap(*std::max_element(spins.begin(), spins.end()) + 1,
                                     UINT32_MAX);
    std::uint32_t used = 0;
    for (std::size_t i = 0; i < spins.size(); ++i) {
      if (remap[spins[i]] == UINT32_MAX) remap[spins[i]] = used++;
      label[members[c][i]] = label_base + remap[spins[i]];
    }
    label_base += used;
  }

  CommunityReport report;
  report.algorithm = algorithm_name(Algorithm::spinglass);
  report.params = params;
  report.partition = Partition(std::move(label));
  detail::finalize_report(graph, report);
  return report;
}

}  // namespace copref
