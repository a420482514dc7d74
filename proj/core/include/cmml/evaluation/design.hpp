#pragma once

#include <span>
#include <string>
#include <vector>

#include "cmml/learners/matrix.hpp"
#include "cmml/tabular.hpp"

namespace cmml {

// Numeric and binary features with role input or derived, in column order,
// excluding `target`.
std::vector<std::string> model_features(const Dataset& d, const std::string& target);

// Throws DataError naming the feature and row of the first missing cell, or
// naming a categorical feature; UnknownFeatureError for absent names.
Matrix feature_matrix(const Dataset& d, std::span<const std::string> features);
std::vector<double> target_vector(const Dataset& d, const std::string& target);

}  // namespace cmml
