#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cmml/learners/matrix.hpp"
#include "cmml/learners/tree.hpp"

namespace cmml {

enum class GbmTask { regression, binary };

std::string_view to_string(GbmTask task);
GbmTask parse_gbm_task(std::string_view text);

struct GbmParams {
  std::size_t rounds = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  std::size_t min_samples_leaf = 1;
  GbmTask task = GbmTask::binary;
};

struct GbmModel {
  GbmTask task = GbmTask::binary;
  double init = 0.0;  // mean target, or log-odds of class 1
  double learning_rate = 0.1;
  std::vector<DecisionTree> trees;
  std::size_t n_features = 0;

  double raw(std::span<const double> x) const;  // F(x)
  double predict_proba(std::span<const double> x) const;  // binary only
  double predict(std::span<const double> x) const;  // value, or class 0/1
  bool operator==(const GbmModel&) const = default;
};

GbmModel fit_gbm(const Matrix& X, std::span<const double> y, const GbmParams& params);

}  // namespace cmml
