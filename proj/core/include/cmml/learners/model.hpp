#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "cmml/learners/adaboost.hpp"
#include "cmml/learners/gbm.hpp"
#include "cmml/learners/kmeans.hpp"
#include "cmml/learners/knn.hpp"
#include "cmml/learners/linear.hpp"
#include "cmml/learners/matrix.hpp"
#include "cmml/learners/tree.hpp"

namespace cmml {

using TrainedModel = std::variant<LinearModel, LogisticModel, DecisionTree, AdaBoostModel, GbmModel,
                                  KnnModel, KmeansModel>;

enum class ModelFamily { linear, logistic, cart, adaboost, gbm, knn, kmeans };

std::string_view to_string(ModelFamily family);
ModelFamily parse_model_family(std::string_view text);
ModelFamily family_of(const TrainedModel& model);

using ParamValue = std::variant<double, std::string>;

// A model family plus hyperparameters. Recognised keys per family:
//   linear    step_size max_iters tolerance l1 l2
//   logistic  step_size max_iters tolerance l1 l2 threshold
//   cart      max_depth min_samples_leaf criterion
//   adaboost  rounds
//   gbm       rounds max_depth learning_rate min_samples_leaf
//   knn       k p
//   kmeans    k epsilon max_iters p
// Binary-classification runs use labels 0/1 throughout; AdaBoost maps them to ±1
// internally and GBM/CART pick their classification variants.
struct ModelSpec {
  ModelFamily family = ModelFamily::logistic;
  std::map<std::string, ParamValue> params;

  double number(const std::string& key, double fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  // Throws ConfigError naming the first unrecognised key.
  void validate() const;
  std::string label() const;  // "family(k=v, ...)" with keys in order
  bool operator==(const ModelSpec&) const = default;
};

enum class Task { classification, regression };

TrainedModel fit(const ModelSpec& spec, const Matrix& X, std::span<const double> y, Task task,
                 std::uint64_t seed);

struct Prediction {
  double label = 0.0;                // class 0/1, regression value, or cluster index
  std::optional<double> probability; // P(class 1) for probabilistic classifiers
  double score = 0.0;                // ranking score for AUC
};

Prediction predict(const TrainedModel& model, std::span<const double> x);
std::size_t n_features(const TrainedModel& model);

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

// {"kind", "version", "params", "state"}; reading reproduces predictions bit for bit.
nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

}  // namespace cmml
