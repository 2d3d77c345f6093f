#include "copref/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "copref/errors.hpp"
#include "copref/rng.hpp"

namespace copref {

double SymmetricMatrix::norm() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) sum += at(i, j) * at(i, j);
  return std::sqrt(sum);
}

double SymmetricMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += at(i, i);
  return t;
}

namespace {

// One Jacobi rotation zeroing a(p,q), applied to the dense working copy and
// accumulated into the eigenvector matrix v. Standard Rutishauser formulas.
void rotate(std::vector<double>& a, std::vector<double>& v, std::size_t n, std::size_t p,
            std::size_t q) {
  const double apq = a[p * n + q];
  if (apq == 0.0) return;
  const double app = a[p * n + p];
  const double aqq = a[q * n + q];
  const double theta = (aqq - app) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  a[p * n + p] = app - t * apq;
  a[q * n + q] = aqq + t * apq;
  a[p * n + q] = 0.0;
  a[q * n + p] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == p || i == q) continue;
    const double aip = a[i * n + p];
    const double aiq = a[i * n + q];
    a[i * n + p] = aip - s * (aiq + tau * aip);
    a[i * n + q] = aiq + s * (aip - tau * aiq);
    a[p * n + i] = a[i * n + p];
    a[q * n + i] = a[i * n + q];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double vip = v[i * n + p];
    const double viq = v[i * n + q];
    v[i * n + p] = vip - s * (viq + tau * vip);
    v[i * n + q] = viq + s * (vip - tau * viq);
  }
}

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += a[i * n + j] * a[i * n + j];
  return std::sqrt(2.0 * sum);
}

}  // namespace

EigenResult eigensolve_symmetric(const SymmetricMatrix& matrix, std::size_t k) {
  const std::size_t n = matrix.order();
  if (n == 0) throw std::invalid_argument("empty matrix");
  if (k < 1 || k > n) throw std::invalid_argument("k must lie in [1, n]");

  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = matrix.at(i, j);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  const double scale = matrix.norm();
  const double tol = 1e-12 * std::max(scale, 1e-300);
  constexpr int kMaxSweeps = 100;

  int sweep = 0;
  if (n > 1) {
    for (; sweep < kMaxSweeps; ++sweep) {
      const double off = off_diagonal_norm(a, n);
      if (off <= tol) break;
      // Threshold strategy: skip elements already far below the sweep target.
      const double threshold = off / (static_cast<double>(n) * n);
      for (std::size_t p = 0; p < n - 1; ++p)
        for (std::size_t q = p + 1; q < n; ++q)
          if (std::abs(a[p * n + q]) > threshold) rotate(a, v, n, p, q);
    }
    if (sweep == kMaxSweeps && off_diagonal_norm(a, n) > tol)
      throw algorithm_error("eigensolver did not converge after " + std::to_string(kMaxSweeps) +
                            " sweeps (off-diagonal norm " +
                            std::to_string(off_diagonal_norm(a, n)) + ", tolerance " +
                            std::to_string(tol) + ")");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });

  EigenResult result;
  result.eigenvalues.resize(k);
  result.vectors = Embedding(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t col = order[j];
    result.eigenvalues[j] = a[col * n + col];
    // Sign convention: largest-magnitude component positive.
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = std::abs(v[i * n + col]);
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    const double sign = v[arg * n + col] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) result.vectors.at(i, j) = sign * v[i * n + col];
  }
  return result;
}

namespace {

double squared_distance(const Embedding& points, std::size_t row, const std::vector<double>& center,
                        std::size_t dims) {
  double d = 0.0;
  for (std::size_t c = 0; c < dims; ++c) {
    const double diff = points.at(row, c) - center[c];
    d += diff * diff;
  }
  return d;
}

}  // namespace

Partition kmeans(const Embedding& points, std::size_t k, std::uint64_t seed,
                 std::vector<double>* objective_trace) {
  const std::size_t n = points.rows;
  const std::size_t dims = points.cols;
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (k > n) throw std::invalid_argument("k exceeds the number of points");
  if (objective_trace) objective_trace->clear();

  Rng rng(seed);
  // k-means++ seeding.
  std::vector<std::vector<double>> centers;
  centers.reserve(k);
  {
    std::vector<double> first(dims);
    const std::size_t pick = rng.uniform_index(n);
    for (std::size_t c = 0; c < dims; ++c) first[c] = points.at(pick, c);
    centers.push_back(std::move(first));
  }
  std::vector<double> dist2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, squared_distance(points, i, c, dims));
      dist2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform_real() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.uniform_index(n);  // all points coincide with a center
    }
    std::vector<double> next(dims);
    for (std::size_t c = 0; c < dims; ++c) next[c] = points.at(pick, c);
    centers.push_back(std::move(next));
  }

  std::vector<std::uint32_t> assignment(n, 0);
  constexpr int kMaxIterations = 300;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t best_cluster = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(points, i, centers[c], dims);
        if (d < best) {
          best = d;
          best_cluster = static_cast<std::uint32_t>(c);
        }
      }
      if (assignment[i] != best_cluster) {
        assignment[i] = best_cluster;
        changed = true;
      }
    }
    if (iter > 0 && !changed) break;

    // Recompute centers; an empty cluster is re-seeded with the point
    // farthest from its current center.
    std::vector<std::size_t> sizes(k, 0);
    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ++sizes[assignment[i]];
      for (std::size_t c = 0; c < dims; ++c) centers[assignment[i]][c] += points.at(i, c);
    }
    for (std::size_t c = 0; c < k; ++c)
      if (sizes[c] > 0)
        for (std::size_t d = 0; d < dims; ++d) centers[c][d] /= static_cast<double>(sizes[c]);
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      std::size_t farthest = 0;
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = squared_distance(points, i, centers[assignment[i]], dims);
        if (d > best) {
          best = d;
          farthest = i;
        }
      }
      for (std::size_t d = 0; d < dims; ++d) centers[c][d] = points.at(farthest, d);
      assignment[farthest] = static_cast<std::uint32_t>(c);
      sizes[c] = 1;
    }

    if (objective_trace) {
      double obj = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        obj += squared_distance(points, i, centers[assignment[i]], dims);
      objective_trace->push_back(obj);
    }
  }
  return Partition(std::move(assignment));
}

}  // namespace copref
