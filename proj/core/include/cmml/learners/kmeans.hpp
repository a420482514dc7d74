#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cmml/learners/matrix.hpp"

namespace cmml {

struct KmeansParams {
  std::size_t k = 2;
  double epsilon = 1e-6;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;
  double p = 2.0;
};

struct KmeansModel {
  Matrix centroids;  // k rows
  double p = 2.0;
  std::vector<std::size_t> assignments;  // training rows
  // Σ squared distance to the assigned centroid, after each centroid update.
  std::vector<double> objective_history;
  std::size_t iterations = 0;

  std::size_t predict(std::span<const double> x) const;  // nearest, ties to lowest index
  bool operator==(const KmeansModel&) const = default;
};

// Lloyd iterations from k distinct seeded rows. Stops when the total centroid
// movement Σ_j d(c_j, c_j') falls below epsilon or after max_iters updates.
// An empty cluster is re-seeded at the row farthest from its centroid.
KmeansModel kmeans(const Matrix& X, const KmeansParams& params);

}  // namespace cmml
