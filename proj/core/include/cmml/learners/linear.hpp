#pragma once

#include <span>
#include <vector>

#include "cmml/learners/gradient_descent.hpp"
#include "cmml/learners/matrix.hpp"

namespace cmml {

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t iterations = 0;

  double predict(std::span<const double> x) const;
  bool operator==(const LinearModel&) const = default;
};

struct LogisticModel {
  double intercept = 0.0;
  std::vector<double> coefficients;
  double threshold = 0.5;
  std::size_t iterations = 0;

  double decision(std::span<const double> x) const;  // β₀ + β·x
  double predict_proba(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
  bool operator==(const LogisticModel&) const = default;
};

// Parameter layout for both objectives: [bias, w_1, ..., w_d]; the bias is
// never penalised.
//   linear:   (1/n) Σ ½ (ŷ − y)²
//   logistic: (1/n) Σ [softplus(z) − y z],  z = β₀ + β·x
Objective linear_objective(const Matrix& X, std::span<const double> y);
Objective logistic_objective(const Matrix& X, std::span<const double> y);

LinearModel fit_linear(const Matrix& X, std::span<const double> y, const GDConfig& cfg);
LogisticModel fit_logistic(const Matrix& X, std::span<const double> y, const GDConfig& cfg,
                           double threshold = 0.5);

double sigmoid(double z);
double softplus(double z);  // ln(1 + e^z) without overflow

}  // namespace cmml
