#include "cmml/learners/linear.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace cmml {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

namespace {

void check_shapes(const Matrix& X, std::span<const double> y) {
  if (X.rows() == 0) throw std::invalid_argument("cannot fit on an empty training set");
  if (y.size() != X.rows()) throw std::invalid_argument("target length differs from row count");
}

double affine(std::span<const double> w, std::span<const double> x) {
  double z = w[0];
  for (std::size_t j = 0; j < x.size(); ++j) z += w[j + 1] * x[j];
  return z;
}

std::vector<bool> bias_free_mask(std::size_t d) {
  std::vector<bool> mask(d + 1, true);
  mask[0] = false;
  return mask;
}

}  // namespace

Objective linear_objective(const Matrix& X, std::span<const double> y) {
  check_shapes(X, y);
  auto Xp = std::make_shared<const Matrix>(X);
  auto yp = std::make_shared<const std::vector<double>>(y.begin(), y.end());
  const double n = static_cast<double>(X.rows());
  Objective f;
  f.value = [Xp, yp, n](std::span<const double> w) {
    double sum = 0.0;
    for (std::size_t i = 0; i < Xp->rows(); ++i) {
      const double r = affine(w, Xp->row(i)) - (*yp)[i];
      sum += 0.5 * r * r;
    }
    return sum / n;
  };
  f.gradient = [Xp, yp, n](std::span<const double> w, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < Xp->rows(); ++i) {
      const auto x = Xp->row(i);
      const double r = affine(w, x) - (*yp)[i];
      g[0] += r;
      for (std::size_t j = 0; j < x.size(); ++j) g[j + 1] += r * x[j];
    }
    for (double& v : g) v /= n;
  };
  f.penalized = bias_free_mask(X.cols());
  return f;
}

Objective logistic_objective(const Matrix& X, std::span<const double> y) {
  check_shapes(X, y);
  for (double v : y) {
    if (v != 0.0 && v != 1.0) throw std::invalid_argument("logistic targets must be 0 or 1");
  }
  auto Xp = std::make_shared<const Matrix>(X);
  auto yp = std::make_shared<const std::vector<double>>(y.begin(), y.end());
  const double n = static_cast<double>(X.rows());
  Objective f;
  // −[y ln σ(z) + (1−y) ln(1−σ(z))] = softplus(z) − y z
  f.value = [Xp, yp, n](std::span<const double> w) {
    double sum = 0.0;
    for (std::size_t i = 0; i < Xp->rows(); ++i) {
      const double z = affine(w, Xp->row(i));
      sum += softplus(z) - (*yp)[i] * z;
    }
    return sum / n;
  };
  f.gradient = [Xp, yp, n](std::span<const double> w, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < Xp->rows(); ++i) {
      const auto x = Xp->row(i);
      const double r = sigmoid(affine(w, x)) - (*yp)[i];
      g[0] += r;
      for (std::size_t j = 0; j < x.size(); ++j) g[j + 1] += r * x[j];
    }
    for (double& v : g) v /= n;
  };
  f.penalized = bias_free_mask(X.cols());
  return f;
}

double LinearModel::predict(std::span<const double> x) const {
  if (x.size() != weights.size()) throw std::invalid_argument("feature count mismatch");
  double v = bias;
  for (std::size_t j = 0; j < x.size(); ++j) v += weights[j] * x[j];
  return v;
}

double LogisticModel::decision(std::span<const double> x) const {
  if (x.size() != coefficients.size()) throw std::invalid_argument("feature count mismatch");
  double z = intercept;
  for (std::size_t j = 0; j < x.size(); ++j) z += coefficients[j] * x[j];
  return z;
}

double LogisticModel::predict_proba(std::span<const double> x) const { return sigmoid(decision(x)); }

int LogisticModel::predict(std::span<const double> x) const {
  return predict_proba(x) >= threshold ? 1 : 0;
}

LinearModel fit_linear(const Matrix& X, std::span<const double> y, const GDConfig& cfg) {
  const GDResult r = gradient_descent(linear_objective(X, y), std::vector<double>(X.cols() + 1, 0.0), cfg);
  LinearModel m;
  m.bias = r.weights[0];
  m.weights.assign(r.weights.begin() + 1, r.weights.end());
  m.iterations = r.iterations;
  return m;
}

LogisticModel fit_logistic(const Matrix& X, std::span<const double> y, const GDConfig& cfg,
                           double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("logistic threshold must lie in (0, 1)");
  }
  const GDResult r =
      gradient_descent(logistic_objective(X, y), std::vector<double>(X.cols() + 1, 0.0), cfg);
  LogisticModel m;
  m.intercept = r.weights[0];
  m.coefficients.assign(r.weights.begin() + 1, r.weights.end());
  m.threshold = threshold;
  m.iterations = r.iterations;
  return m;
}

}  // namespace cmml
