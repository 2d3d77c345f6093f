#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "copref/community.hpp"
#include "copref/errors.hpp"
#include "copref/linalg.hpp"

namespace copref {

namespace {

// L = D - W, or the symmetrized random-walk form
// L_sym = I - D^{-1/2} W D^{-1/2}, whose eigenvectors u map to the
// L_rw = I - D^{-1} W eigenvectors as D^{-1/2} u with the same eigenvalues.
SymmetricMatrix build_laplacian(const WeightedGraph& graph, LaplacianKind kind,
                                std::vector<double>& inv_sqrt_degree) {
  const std::size_t n = graph.node_count();
  SymmetricMatrix lap(n);
  inv_sqrt_degree.assign(n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double d = graph.weighted_degree(i);
    if (d > 0.0) inv_sqrt_degree[i] = 1.0 / std::sqrt(d);
  }
  if (kind == LaplacianKind::standard) {
    for (std::uint32_t i = 0; i < n; ++i) lap.set(i, i, graph.weighted_degree(i));
    for (const auto& e : graph.edges()) lap.set(e.a, e.b, -e.weight);
  } else {
    for (std::uint32_t i = 0; i < n; ++i)
      lap.set(i, i, graph.weighted_degree(i) > 0.0 ? 1.0 : 0.0);
    for (const auto& e : graph.edges())
      lap.set(e.a, e.b, -e.weight * inv_sqrt_degree[e.a] * inv_sqrt_degree[e.b]);
  }
  return lap;
}

// Largest gap between consecutive eigenvalues among the smallest
// min(20, n); k is the position of the gap (ties take the smallest k).
std::size_t eigengap_k(const std::vector<double>& eigenvalues) {
  const std::size_t m = eigenvalues.size();
  if (m <= 1) return 1;
  std::size_t k = 1;
  double best = -1.0;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double gap = eigenvalues[i + 1] - eigenvalues[i];
    if (gap > best) {
      best = gap;
      k = i + 1;
    }
  }
  return k;
}

}  // namespace

CommunityReport spectral(const WeightedGraph& graph, const AlgorithmParams& params) {
  detail::require_nonempty(graph, "spectral");
  const std::size_t n = graph.node_count();
  if (params.k_clusters && *params.k_clusters > n)
    throw algorithm_error("spectral: k exceeds the node count");

  std::vector<double> inv_sqrt_degree;
  const SymmetricMatrix lap = build_laplacian(graph, params.laplacian, inv_sqrt_degree);

  // One decomposition serves both the eigengap scan and the embedding.
  const std::size_t want = params.k_clusters
                               ? *params.k_clusters
                               : std::min<std::size_t>(20, n);
  EigenResult eigen = eigensolve_symmetric(lap, want);

  const std::size_t k = params.k_clusters ? *params.k_clusters : eigengap_k(eigen.eigenvalues);

  Embedding points(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = eigen.vectors.at(i, j);
      if (params.laplacian == LaplacianKind::random_walk) v *= inv_sqrt_degree[i];
      points.at(i, j) = v;
    }
    // Unit-normalize columns (the random-walk rescale denormalizes them).
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm2 += points.at(i, j) * points.at(i, j);
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t i = 0; i < n; ++i) points.at(i, j) *= inv;
    }
  }

  CommunityReport report;
  report.algorithm = algorithm_name(Algorithm::spectral);
  report.params = params;
  report.partition = kmeans(points, k, params.seed);
  detail::finalize_report(graph, report);
  return report;
}

}  // namespace copref
