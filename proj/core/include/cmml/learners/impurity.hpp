#pragma once

#include <utility>
#include <vector>

namespace cmml {

// Counts may be fractional (weighted). Both throw std::invalid_argument when
// no count is positive or any count is negative.
double gini(const std::vector<double>& class_counts);
double entropy_impurity(const std::vector<double>& class_counts);

// Σ (n_i / N) * impurity_i over (n_i, impurity_i) pairs with n_i > 0.
double weighted_impurity(const std::vector<std::pair<double, double>>& children);

}  // namespace cmml
