#include "cmml/learners/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "cmml/error.hpp"

namespace cmml {

double minkowski(std::span<const double> a, std::span<const double> b, double p,
                 std::span<const double> weights) {
  if (a.size() != b.size()) throw std::invalid_argument("feature count mismatch");
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double w = weights.empty() ? 1.0 : weights[j];
    const double d = std::abs(a[j] - b[j]);
    sum += w * (p == 2.0 ? d * d : (p == 1.0 ? d : std::pow(d, p)));
  }
  if (p == 1.0) return sum;
  if (p == 2.0) return std::sqrt(sum);
  return std::pow(sum, 1.0 / p);
}

KnnModel fit_knn(const Matrix& X, std::span<const double> y, const KnnParams& params) {
  if (y.size() != X.rows()) throw std::invalid_argument("target length differs from row count");
  if (params.k < 1) throw std::invalid_argument("k must be at least 1");
  if (params.k > X.rows()) {
    throw Error("k = " + std::to_string(params.k) + " exceeds the " + std::to_string(X.rows()) +
                " training rows");
  }
  if (!(params.p >= 1.0)) throw std::invalid_argument("Minkowski p must be >= 1");
  if (!params.feature_weights.empty() && params.feature_weights.size() != X.cols()) {
    throw std::invalid_argument("one feature weight per column required");
  }
  for (double v : y) {
    if (v < 0.0 || v != std::floor(v)) throw std::invalid_argument("KNN labels must be class indices");
  }
  return KnnModel{X, std::vector<double>(y.begin(), y.end()), params};
}

std::vector<std::size_t> KnnModel::neighbours(std::span<const double> x) const {
  std::vector<std::pair<double, std::size_t>> dist(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    dist[i] = {minkowski(x, X.row(i), params.p, params.feature_weights), i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(params.k), dist.end());
  std::vector<std::size_t> out(params.k);
  for (std::size_t i = 0; i < params.k; ++i) out[i] = dist[i].second;
  return out;
}

double KnnModel::predict(std::span<const double> x) const {
  struct Tally {
    std::size_t votes = 0;
    double distance = 0.0;
  };
  std::map<double, Tally> tally;  // ordered by class, so ties fall to the lower class
  for (std::size_t i : neighbours(x)) {
    Tally& t = tally[y[i]];
    ++t.votes;
    t.distance += minkowski(x, X.row(i), params.p, params.feature_weights);
  }
  auto best = tally.begin();
  for (auto it = std::next(tally.begin()); it != tally.end(); ++it) {
    if (it->second.votes > best->second.votes ||
        (it->second.votes == best->second.votes && it->second.distance < best->second.distance)) {
      best = it;
    }
  }
  return best->first;
}

double KnnModel::predict_proba(std::span<const double> x) const {
  const auto idx = neighbours(x);
  const auto ones = std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return y[i] == 1.0; });
  return static_cast<double>(ones) / static_cast<double>(idx.size());
}

}  // namespace cmml
