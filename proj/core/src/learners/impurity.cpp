#include "cmml/learners/impurity.hpp"

#include <cmath>
#include <stdexcept>

namespace cmml {

namespace {

double checked_total(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) {
    if (c < 0.0) throw std::invalid_argument("class counts must be non-negative");
    total += c;
  }
  if (!(total > 0.0)) throw std::invalid_argument("impurity needs at least one positive count");
  return total;
}

}  // namespace

double gini(const std::vector<double>& class_counts) {
  const double total = checked_total(class_counts);
  double sum_sq = 0.0;
  for (double c : class_counts) {
    const double p = c / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double entropy_impurity(const std::vector<double>& class_counts) {
  const double total = checked_total(class_counts);
  double h = 0.0;
  for (double c : class_counts) {
    if (c > 0.0) {
      const double p = c / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

double weighted_impurity(const std::vector<std::pair<double, double>>& children) {
  double total = 0.0;
  for (const auto& [n, impurity] : children) {
    if (!(n > 0.0)) throw std::invalid_argument("child sample counts must be positive");
    total += n;
  }
  double sum = 0.0;
  for (const auto& [n, impurity] : children) sum += (n / total) * impurity;
  return sum;
}

}  // namespace cmml
