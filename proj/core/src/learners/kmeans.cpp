#include "cmml/learners/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "cmml/error.hpp"
#include "cmml/learners/knn.hpp"
#include "cmml/random.hpp"

namespace cmml {

namespace {

std::size_t nearest(const Matrix& centroids, std::span<const double> x, double p, double* distance) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centroids.rows(); ++j) {
    const double d = minkowski(x, centroids.row(j), p);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  if (distance) *distance = best_d;
  return best;
}

bool same_row(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::size_t KmeansModel::predict(std::span<const double> x) const {
  if (x.size() != centroids.cols()) throw std::invalid_argument("feature count mismatch");
  return nearest(centroids, x, p, nullptr);
}

KmeansModel kmeans(const Matrix& X, const KmeansParams& params) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  if (params.k < 1) throw std::invalid_argument("k must be at least 1");
  if (params.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(params.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");

  // Seeded distinct rows as initial centroids.
  Rng rng(params.seed);
  std::vector<std::size_t> order = iota_indices(n);
  rng.shuffle(order);
  std::vector<std::size_t> chosen;
  for (std::size_t r : order) {
    if (chosen.size() == params.k) break;
    const bool duplicate = std::any_of(chosen.begin(), chosen.end(),
                                       [&](std::size_t c) { return same_row(X.row(c), X.row(r)); });
    if (!duplicate) chosen.push_back(r);
  }
  if (chosen.size() < params.k) {
    throw Error("k = " + std::to_string(params.k) + " exceeds the number of distinct rows (" +
                std::to_string(chosen.size()) + ")");
  }

  KmeansModel model;
  model.p = params.p;
  model.centroids = X.select_rows(chosen);
  model.assignments.assign(n, 0);
  std::vector<double> dist(n);

  for (std::size_t iter = 0; iter < params.max_iters; ++iter) {
    for (std::size_t i = 0; i < n; ++i) model.assignments[i] = nearest(model.centroids, X.row(i), params.p, &dist[i]);

    Matrix next(params.k, d, 0.0);
    std::vector<std::size_t> sizes(params.k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = model.assignments[i];
      ++sizes[c];
      for (std::size_t j = 0; j < d; ++j) next(c, j) += X(i, j);
    }
    for (std::size_t c = 0; c < params.k; ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) next(c, j) /= static_cast<double>(sizes[c]);
    }

    // Objective for the new centroids under the current assignment; it never
    // exceeds the previous value because each mean minimises its squared sum.
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = minkowski(X.row(i), next.row(model.assignments[i]), params.p);
      objective += dist[i] * dist[i];
    }

    for (std::size_t c = 0; c < params.k; ++c) {
      if (sizes[c] != 0) continue;
      const std::size_t far =
          static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
      for (std::size_t j = 0; j < d; ++j) next(c, j) = X(far, j);
      dist[far] = 0.0;
    }

    double movement = 0.0;
    for (std::size_t c = 0; c < params.k; ++c) {
      movement += minkowski(model.centroids.row(c), next.row(c), params.p);
    }
    model.centroids = std::move(next);
    model.objective_history.push_back(objective);
    model.iterations = iter + 1;
    if (movement < params.epsilon) break;
  }
  for (std::size_t i = 0; i < n; ++i) model.assignments[i] = nearest(model.centroids, X.row(i), params.p, nullptr);
  return model;
}

}  // namespace cmml
