#include "cmml/learners/adaboost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmml/learners/tree.hpp"
#include "cmml/random.hpp"

namespace cmml {

double adaboost_alpha(double error) {
  const double e = std::clamp(error, kAdaBoostErrorClamp, 1.0 - kAdaBoostErrorClamp);
  return std::log((1.0 - e) / e);
}

double AdaBoostModel::score(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t m = 0; m < stumps.size(); ++m) s += alphas[m] * stumps[m].predict(x);
  return s;
}

double AdaBoostModel::predict(std::span<const double> x) const { return score(x) > 0.0 ? 1.0 : -1.0; }

AdaBoostModel fit_adaboost(const Matrix& X, std::span<const double> y, const AdaBoostParams& params) {
  const std::size_t n = X.rows();
  if (n == 0) throw std::invalid_argument("cannot boost on an empty training set");
  if (y.size() != n) throw std::invalid_argument("target length differs from row count");
  for (double v : y) {
    if (v != -1.0 && v != 1.0) throw std::invalid_argument("AdaBoost labels must be -1 or +1");
  }

  Rng rng(params.seed);
  AdaBoostModel model;
  model.n_features = X.cols();
  std::vector<std::size_t> sample = iota_indices(n);
  std::vector<double> weights(n);
  std::vector<double> labels(n);  // class indices for the stump search
  std::vector<double> cumulative(n);
  const TreeParams stump_params{1, 1, Criterion::gini};

  for (std::size_t round = 0; round < params.rounds; ++round) {
    // Equal weights on the current (resampled) set.
    std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(n));
    const Matrix Xs = X.select_rows(sample);
    for (std::size_t i = 0; i < n; ++i) labels[i] = y[sample[i]] > 0.0 ? 1.0 : 0.0;

    const DecisionTree tree = fit_cart(Xs, labels, stump_params, weights);
    AdaBoostRound record;
    if (tree.nodes().front().is_leaf()) {
      record.error = 0.5;
      model.rounds.push_back(record);
    } else {
      const TreeNode& root = tree.nodes().front();
      auto to_sign = [](double cls) { return cls > 0.5 ? 1.0 : -1.0; };
      record.stump = Stump{*root.feature, root.threshold, to_sign(tree.nodes()[root.left].value),
                           to_sign(tree.nodes()[root.right].value)};

      double wrong = 0.0;
      double total = 0.0;
      std::vector<bool> miss(n);
      for (std::size_t i = 0; i < n; ++i) {
        miss[i] = record.stump.predict(Xs.row(i)) != y[sample[i]];
        if (miss[i]) wrong += weights[i];
        total += weights[i];
      }
      record.error = std::clamp(wrong / total, kAdaBoostErrorClamp, 1.0 - kAdaBoostErrorClamp);
      record.alpha = adaboost_alpha(record.error);
      record.accepted = record.error < 0.5;
      model.rounds.push_back(record);

      if (record.accepted) {
        model.stumps.push_back(record.stump);
        model.alphas.push_back(record.alpha);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          weights[i] *= std::exp(miss[i] ? record.alpha : -record.alpha);
          norm += weights[i];
        }
        for (double& w : weights) w /= norm;
      }
    }

    // Draw the next training set by weight, with replacement.
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) cumulative[i] = (acc += weights[i]);
    std::vector<std::size_t> next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = sample[rng.weighted(cumulative)];
    sample = std::move(next);
  }
  return model;
}

}  // namespace cmml
