#include "cmml/learners/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cmml/error.hpp"
#include "cmml/learners/linear.hpp"

namespace cmml {

std::string_view to_string(GbmTask task) { return task == GbmTask::binary ? "binary" : "regression"; }

GbmTask parse_gbm_task(std::string_view text) {
  if (text == "binary") return GbmTask::binary;
  if (text == "regression") return GbmTask::regression;
  throw std::invalid_argument("unknown boosting task '" + std::string(text) + "'");
}

double GbmModel::raw(std::span<const double> x) const {
  double f = init;
  for (const DecisionTree& t : trees) f += learning_rate * t.predict(x);
  return f;
}

double GbmModel::predict_proba(std::span<const double> x) const {
  if (task != GbmTask::binary) throw std::logic_error("regression boosting has no probabilities");
  return sigmoid(raw(x));
}

double GbmModel::predict(std::span<const double> x) const {
  if (task == GbmTask::regression) return raw(x);
  return predict_proba(x) >= 0.5 ? 1.0 : 0.0;
}

namespace {

// Keeps Newton leaf values finite when every row in a leaf is already
// predicted with near certainty.
constexpr double kMinHessian = 1e-12;

}  // namespace

GbmModel fit_gbm(const Matrix& X, std::span<const double> y, const GbmParams& params) {
  const std::size_t n = X.rows();
  if (n == 0) throw std::invalid_argument("cannot boost on an empty training set");
  if (y.size() != n) throw std::invalid_argument("target length differs from row count");
  if (!(params.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");

  GbmModel model;
  model.task = params.task;
  model.n_features = X.cols();
  model.learning_rate = params.learning_rate;
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  if (params.task == GbmTask::binary) {
    for (double v : y) {
      if (v != 0.0 && v != 1.0) throw std::invalid_argument("binary boosting needs 0/1 targets");
    }
    if (mean == 0.0 || mean == 1.0) throw Error("binary boosting needs both classes in the target");
    model.init = std::log(mean / (1.0 - mean));
  } else {
    model.init = mean;
  }

  std::vector<double> F(n, model.init);
  std::vector<double> residual(n);
  const TreeParams tree_params{params.max_depth, params.min_samples_leaf, Criterion::squared};

  for (std::size_t m = 0; m < params.rounds; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] = y[i] - (params.task == GbmTask::binary ? sigmoid(F[i]) : F[i]);
    }
    DecisionTree tree = fit_cart(X, residual, tree_params);

    if (params.task == GbmTask::binary) {
      const std::size_t n_nodes = tree.nodes().size();
      std::vector<double> num(n_nodes, 0.0);
      std::vector<double> den(n_nodes, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t leaf = tree.leaf_index(X.row(i));
        const double p = sigmoid(F[i]);
        num[leaf] += residual[i];
        den[leaf] += p * (1.0 - p);
      }
      for (std::size_t j = 0; j < n_nodes; ++j) {
        if (tree.nodes()[j].is_leaf()) tree.set_leaf_value(j, num[j] / std::max(den[j], kMinHessian));
      }
    }

    for (std::size_t i = 0; i < n; ++i) F[i] += params.learning_rate * tree.predict(X.row(i));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace cmml
