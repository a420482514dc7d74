#include "cmml/evaluation/design.hpp"

#include "cmml/error.hpp"

namespace cmml {

std::vector<std::string> model_features(const Dataset& d, const std::string& target) {
  std::vector<std::string> out;
  for (const FeatureMeta& f : d.features()) {
    if (f.name == target || f.kind == FeatureKind::categorical) continue;
    if (f.role == FeatureRole::input || f.role == FeatureRole::derived) out.push_back(f.name);
  }
  return out;
}

namespace {

std::vector<double> numeric_column(const Dataset& d, const std::string& name) {
  if (!d.contains(name)) throw UnknownFeatureError(name);
  if (d.feature(name).kind == FeatureKind::categorical) {
    throw DataError("feature '" + name + "' is categorical; encode it before modelling");
  }
  const Column& col = d.column(name);
  std::vector<double> out(col.size());
  for (std::size_t r = 0; r < col.size(); ++r) {
    const double* v = number_if(col[r]);
    if (!v) throw DataError("feature '" + name + "' is missing in row " + std::to_string(r), r);
    out[r] = *v;
  }
  return out;
}

}  // namespace

Matrix feature_matrix(const Dataset& d, std::span<const std::string> features) {
  Matrix X(d.n_rows(), features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    const auto col = numeric_column(d, features[j]);
    for (std::size_t r = 0; r < col.size(); ++r) X(r, j) = col[r];
  }
  return X;
}

std::vector<double> target_vector(const Dataset& d, const std::string& target) {
  return numeric_column(d, target);
}

}  // namespace cmml
