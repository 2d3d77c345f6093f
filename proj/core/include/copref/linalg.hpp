#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "copref/graph.hpp"

namespace copref {

/// Dense symmetric matrix, lower triangle stored.
class SymmetricMatrix {
public:
  explicit SymmetricMatrix(std::size_t n) : n_(n), tri_(n * (n + 1) / 2, 0.0) {}

  std::size_t order() const { return n_; }

  double at(std::size_t i, std::size_t j) const {
    return i >= j ? tri_[i * (i + 1) / 2 + j] : tri_[j * (j + 1) / 2 + i];
  }
  void set(std::size_t i, std::size_t j, double value) {
    if (i >= j) tri_[i * (i + 1) / 2 + j] = value;
    else tri_[j * (j + 1) / 2 + i] = value;
  }

  /// Frobenius norm.
  double norm() const;
  double trace() const;

private:
  std::size_t n_;
  std::vector<double> tri_;
};

/// n x k coordinate matrix, row-major; columns have unit Euclidean norm.
struct Embedding {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  Embedding() = default;
  Embedding(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
};

struct EigenResult {
  std::vector<double> eigenvalues;  // ascending, k of them
  Embedding vectors;                // n x k, column j pairs with eigenvalue j
};

/// The k algebraically smallest eigenvalues and orthonormal eigenvectors of a
/// symmetric matrix, by cyclic Jacobi rotations (off-norm tolerance 1e-12
/// relative). Eigenvector signs are fixed by making the largest-magnitude
/// component positive. Throws std::invalid_argument unless 1 <= k <= n and
/// algorithm_error if 100 sweeps do not converge.
EigenResult eigensolve_symmetric(const SymmetricMatrix& matrix, std::size_t k);

/// Lloyd k-means with k-means++ seeding. Runs to an assignment fixpoint or
/// 300 iterations; empty clusters are re-seeded with the farthest point.
/// Deterministic given the seed. Throws std::invalid_argument if k exceeds
/// the number of points. `objective_trace`, when given, receives the
/// within-cluster sum of squares after every Lloyd update.
Partition kmeans(const Embedding& points, std::size_t k, std::uint64_t seed,
                 std::vector<double>* objective_trace = nullptr);

}  // namespace copref
