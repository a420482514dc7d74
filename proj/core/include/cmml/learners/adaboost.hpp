#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cmml/learners/matrix.hpp"

namespace cmml {

struct AdaBoostParams {
  std::size_t rounds = 50;
  std::uint64_t seed = 0;
};

struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  double left = -1.0;   // label for x[feature] <= threshold
  double right = 1.0;

  double predict(std::span<const double> x) const {
    return x[feature] <= threshold ? left : right;
  }
  bool operator==(const Stump&) const = default;
};

struct AdaBoostRound {
  Stump stump;
  double error = 0.0;  // weighted error on the weights the stump was fit to, clamped
  double alpha = 0.0;
  bool accepted = false;
  bool operator==(const AdaBoostRound&) const = default;
};

struct AdaBoostModel {
  std::vector<Stump> stumps;
  std::vector<double> alphas;
  std::vector<AdaBoostRound> rounds;  // every round, accepted or not
  std::size_t n_features = 0;

  double score(std::span<const double> x) const;    // Σ α_m h_m(x)
  double predict(std::span<const double> x) const;  // +1 if score > 0, else -1
  bool operator==(const AdaBoostModel&) const = default;
};

constexpr double kAdaBoostErrorClamp = 1e-10;
double adaboost_alpha(double error);  // ln((1 - e) / e) after clamping e

// Labels must be -1 or +1. A round whose best stump has error >= 0.5 or that
// finds no split is recorded but not added to the ensemble.
AdaBoostModel fit_adaboost(const Matrix& X, std::span<const double> y, const AdaBoostParams& params);

}  // namespace cmml
