#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cmml/learners/matrix.hpp"
#include "cmml/random.hpp"
#include "cmml/tabular.hpp"

namespace cmml::test {

inline std::filesystem::path data_path(const std::string& file) {
  return std::filesystem::path(CMML_DATA_DIR) / file;
}

inline std::filesystem::path config_path(const std::string& file) {
  return std::filesystem::path(CMML_CONFIG_DIR) / file;
}

inline const Dataset& pima() {
  static const Dataset d = load_csv(data_path("diabetes.csv"));
  return d;
}

// Numeric dataset with columns x0..x{k-1} plus a target column "y".
inline Dataset numeric_dataset(const std::vector<std::vector<double>>& columns,
                               const std::vector<double>& target,
                               FeatureKind target_kind = FeatureKind::binary) {
  std::vector<FeatureMeta> meta;
  std::vector<Column> cols;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    meta.push_back({"x" + std::to_string(j), FeatureKind::numeric, "", FeatureRole::input, {}});
    cols.emplace_back(columns[j].begin(), columns[j].end());
  }
  meta.push_back({"y", target_kind, "", FeatureRole::target, {}});
  cols.emplace_back(target.begin(), target.end());
  return Dataset(std::move(meta), std::move(cols));
}

inline Dataset single_column(const std::string& name, Column values,
                             FeatureKind kind = FeatureKind::numeric) {
  return Dataset({{name, kind, "", FeatureRole::input, {}}}, {std::move(values)});
}

inline std::vector<double> numbers(const Dataset& d, const std::string& name) {
  std::vector<double> out;
  for (const Cell& c : d.column(name)) out.push_back(std::get<double>(c));
  return out;
}

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = lo + (hi - lo) * rng.uniform();
  }
  return m;
}

// Small integer grid values produce many ties, which is what split search must handle.
inline Matrix random_grid_matrix(Rng& rng, std::size_t rows, std::size_t cols, std::size_t levels) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = static_cast<double>(rng.below(levels));
  }
  return m;
}

inline std::vector<double> random_labels(Rng& rng, std::size_t n, std::size_t classes) {
  std::vector<double> y(n);
  for (double& v : y) v = static_cast<double>(rng.below(classes));
  return y;
}

// A random point on the probability simplex, optionally with exact zeros.
inline std::vector<double> random_simplex(Rng& rng, std::size_t dim, bool allow_zeros) {
  std::vector<double> p(dim);
  double sum = 0.0;
  for (double& v : p) {
    v = (allow_zeros && rng.below(4) == 0) ? 0.0 : rng.uniform() + 1e-3;
    sum += v;
  }
  if (sum == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace cmml::test
