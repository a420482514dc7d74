#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cmml/learners/matrix.hpp"

namespace cmml {

struct KnnParams {
  std::size_t k = 5;
  double p = 2.0;                       // Minkowski exponent, >= 1
  std::vector<double> feature_weights;  // empty: all 1
};

// (Σ_j w_j |a_j − b_j|^p)^(1/p)
double minkowski(std::span<const double> a, std::span<const double> b, double p,
                 std::span<const double> weights = {});

struct KnnModel {
  Matrix X;
  std::vector<double> y;  // class indices
  KnnParams params;

  // Nearest k training rows, ties in distance to the lower row index.
  std::vector<std::size_t> neighbours(std::span<const double> x) const;
  // Majority vote; ties by smaller summed distance, then lower class.
  double predict(std::span<const double> x) const;
  // Fraction of the k neighbours labelled 1.
  double predict_proba(std::span<const double> x) const;
  bool operator==(const KnnModel&) const = default;
};

KnnModel fit_knn(const Matrix& X, std::span<const double> y, const KnnParams& params);

}  // namespace cmml
