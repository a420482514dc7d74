#include "cmml/learners/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmml/csv.hpp"
#include "cmml/error.hpp"

namespace cmml {

using nlohmann::json;

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::linear: return "linear";
    case ModelFamily::logistic: return "logistic";
    case ModelFamily::cart: return "cart";
    case ModelFamily::adaboost: return "adaboost";
    case ModelFamily::gbm: return "gbm";
    case ModelFamily::knn: return "knn";
    case ModelFamily::kmeans: return "kmeans";
  }
  return "linear";
}

ModelFamily parse_model_family(std::string_view text) {
  for (ModelFamily f : {ModelFamily::linear, ModelFamily::logistic, ModelFamily::cart, ModelFamily::adaboost,
                        ModelFamily::gbm, ModelFamily::knn, ModelFamily::kmeans}) {
    if (to_string(f) == text) return f;
  }
  throw ConfigError("unknown model family '" + std::string(text) + "'");
}

ModelFamily family_of(const TrainedModel& model) {
  return static_cast<ModelFamily>(model.index());
}

// ------------------------------------------------------------------ ModelSpec

namespace {

const std::vector<std::string>& allowed_keys(ModelFamily f) {
  static const std::vector<std::string> linear{"step_size", "max_iters", "tolerance", "l1", "l2"};
  static const std::vector<std::string> logistic{"step_size", "max_iters", "tolerance", "l1", "l2", "threshold"};
  static const std::vector<std::string> cart{"max_depth", "min_samples_leaf", "criterion"};
  static const std::vector<std::string> adaboost{"rounds"};
  static const std::vector<std::string> gbm{"rounds", "max_depth", "learning_rate", "min_samples_leaf"};
  static const std::vector<std::string> knn{"k", "p"};
  static const std::vector<std::string> kmeans{"k", "epsilon", "max_iters", "p"};
  switch (f) {
    case ModelFamily::linear: return linear;
    case ModelFamily::logistic: return logistic;
    case ModelFamily::cart: return cart;
    case ModelFamily::adaboost: return adaboost;
    case ModelFamily::gbm: return gbm;
    case ModelFamily::knn: return knn;
    case ModelFamily::kmeans: return kmeans;
  }
  return linear;
}

std::size_t count_param(const ModelSpec& spec, const std::string& key, double fallback) {
  const double v = spec.number(key, fallback);
  if (!(v >= 0.0) || v != std::floor(v)) {
    throw ConfigError("parameter '" + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

std::string param_text(const ParamValue& v) {
  if (const double* d = std::get_if<double>(&v)) return csv::format_number(*d);
  return std::get<std::string>(v);
}

}  // namespace

double ModelSpec::number(const std::string& key, double fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  throw ConfigError("parameter '" + key + "' must be a number");
}

std::string ModelSpec::text(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
  throw ConfigError("parameter '" + key + "' must be a string");
}

void ModelSpec::validate() const {
  const auto& allowed = allowed_keys(family);
  for (const auto& [key, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("model '" + std::string(to_string(family)) + "' has no parameter '" + key + "'");
    }
  }
}

std::string ModelSpec::label() const {
  std::string out(to_string(family));
  if (params.empty()) return out;
  out += "(";
  bool first = true;
  for (const auto& [key, value] : params) {
    if (!first) out += ", ";
    first = false;
    out += key + "=" + param_text(value);
  }
  return out + ")";
}

// ------------------------------------------------------------------------ fit

namespace {

GDConfig gd_config(const ModelSpec& spec, std::uint64_t seed) {
  GDConfig cfg;
  cfg.step_size = spec.number("step_size", 0.1);
  cfg.max_iters = count_param(spec, "max_iters", 1000);
  cfg.tolerance = spec.number("tolerance", 1e-6);
  cfg.l1_penalty = spec.number("l1", 0.0);
  cfg.l2_penalty = spec.number("l2", 0.0);
  cfg.seed = seed;
  return cfg;
}

void require_task(const ModelSpec& spec, Task task, Task wanted) {
  if (task != wanted) {
    throw ConfigError("model '" + std::string(to_string(spec.family)) + "' only supports " +
                      (wanted == Task::classification ? "classification" : "regression"));
  }
}

}  // namespace

TrainedModel fit(const ModelSpec& spec, const Matrix& X, std::span<const double> y, Task task,
                 std::uint64_t seed) {
  spec.validate();
  switch (spec.family) {
    case ModelFamily::linear:
      require_task(spec, task, Task::regression);
      return fit_linear(X, y, gd_config(spec, seed));
    case ModelFamily::logistic:
      require_task(spec, task, Task::classification);
      return fit_logistic(X, y, gd_config(spec, seed), spec.number("threshold", 0.5));
    case ModelFamily::cart: {
      TreeParams p;
      p.max_depth = count_param(spec, "max_depth", 5);
      p.min_samples_leaf = count_param(spec, "min_samples_leaf", 1);
      p.criterion = parse_criterion(spec.text("criterion", task == Task::regression ? "squared" : "gini"));
      if ((p.criterion == Criterion::squared) != (task == Task::regression)) {
        throw ConfigError("criterion '" + std::string(to_string(p.criterion)) + "' does not fit the task");
      }
      return fit_cart(X, y, p);
    }
    case ModelFamily::adaboost: {
      require_task(spec, task, Task::classification);
      std::vector<double> signs(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) throw std::invalid_argument("AdaBoost targets must be 0 or 1");
        signs[i] = y[i] == 1.0 ? 1.0 : -1.0;
      }
      return fit_adaboost(X, signs, AdaBoostParams{count_param(spec, "rounds", 50), seed});
    }
    case ModelFamily::gbm: {
      GbmParams p;
      p.rounds = count_param(spec, "rounds", 100);
      p.max_depth = count_param(spec, "max_depth", 3);
      p.learning_rate = spec.number("learning_rate", 0.1);
      p.min_samples_leaf = count_param(spec, "min_samples_leaf", 1);
      p.task = task == Task::classification ? GbmTask::binary : GbmTask::regression;
      return fit_gbm(X, y, p);
    }
    case ModelFamily::knn: {
      require_task(spec, task, Task::classification);
      KnnParams p;
      p.k = count_param(spec, "k", 5);
      p.p = spec.number("p", 2.0);
      return fit_knn(X, y, p);
    }
    case ModelFamily::kmeans: {
      KmeansParams p;
      p.k = count_param(spec, "k", 2);
      p.epsilon = spec.number("epsilon", 1e-6);
      p.max_iters = count_param(spec, "max_iters", 100);
      p.p = spec.number("p", 2.0);
      p.seed = seed;
      return kmeans(X, p);
    }
  }
  throw std::logic_error("unhandled model family");
}

// -------------------------------------------------------------------- predict

Prediction predict(const TrainedModel& model, std::span<const double> x) {
  return std::visit(
      [&](const auto& m) -> Prediction {
        using T = std::decay_t<decltype(m)>;
        Prediction p;
        if constexpr (std::is_same_v<T, LinearModel>) {
          p.label = p.score = m.predict(x);
        } else if constexpr (std::is_same_v<T, LogisticModel>) {
          const double prob = m.predict_proba(x);
          p.label = prob >= m.threshold ? 1.0 : 0.0;
          p.probability = p.score = prob;
        } else if constexpr (std::is_same_v<T, DecisionTree>) {
          p.label = m.predict(x);
          if (m.is_classifier()) {
            const auto dist = m.predict_proba(x);
            const double prob = dist.size() > 1 ? dist[1] : 0.0;
            p.probability = p.score = prob;
          } else {
            p.score = p.label;
          }
        } else if constexpr (std::is_same_v<T, AdaBoostModel>) {
          p.score = m.score(x);
          p.label = p.score > 0.0 ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, GbmModel>) {
          if (m.task == GbmTask::binary) {
            const double prob = m.predict_proba(x);
            p.label = prob >= 0.5 ? 1.0 : 0.0;
            p.probability = p.score = prob;
          } else {
            p.label = p.score = m.raw(x);
          }
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          p.label = m.predict(x);
          p.probability = p.score = m.predict_proba(x);
        } else {
          p.label = p.score = static_cast<double>(m.predict(x));
        }
        return p;
      },
      model);
}

std::size_t n_features(const TrainedModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) return m.weights.size();
        else if constexpr (std::is_same_v<T, LogisticModel>) return m.coefficients.size();
        else if constexpr (std::is_same_v<T, DecisionTree>) return m.n_features();
        else if constexpr (std::is_same_v<T, AdaBoostModel>) return m.n_features;
        else if constexpr (std::is_same_v<T, GbmModel>) return m.n_features;
        else if constexpr (std::is_same_v<T, KnnModel>) return m.X.cols();
        else return m.centroids.cols();
      },
      model);
}

// ----------------------------------------------------------------------- json

namespace {

constexpr int kSchemaVersion = 1;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const json& data = j.at("data");
  if (data.size() != m.rows()) throw Error("matrix row count mismatch in model file");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto values = data[r].get<std::vector<double>>();
    if (values.size() != m.cols()) throw Error("matrix column count mismatch in model file");
    std::copy(values.begin(), values.end(), m.row(r).begin());
  }
  return m;
}

json tree_to_json(const DecisionTree& t) {
  json nodes = json::array();
  for (const TreeNode& n : t.nodes()) {
    json o = {{"samples", n.samples}, {"value", n.value}};
    if (!n.class_weights.empty()) o["class_weights"] = n.class_weights;
    if (n.feature) {
      o["feature"] = *n.feature;
      o["threshold"] = n.threshold;
      o["left"] = n.left;
      o["right"] = n.right;
    }
    nodes.push_back(std::move(o));
  }
  return {{"criterion", to_string(t.criterion())},
          {"n_features", t.n_features()},
          {"n_classes", t.n_classes()},
          {"nodes", nodes}};
}

DecisionTree tree_from_json(const json& j) {
  std::vector<TreeNode> nodes;
  for (const json& o : j.at("nodes")) {
    TreeNode n;
    n.samples = o.at("samples").get<std::size_t>();
    n.value = o.at("value").get<double>();
    if (o.contains("class_weights")) n.class_weights = o.at("class_weights").get<std::vector<double>>();
    if (o.contains("feature")) {
      n.feature = o.at("feature").get<std::size_t>();
      n.threshold = o.at("threshold").get<double>();
      n.left = o.at("left").get<std::size_t>();
      n.right = o.at("right").get<std::size_t>();
    }
    nodes.push_back(std::move(n));
  }
  for (const TreeNode& n : nodes) {
    if (n.feature && (n.left >= nodes.size() || n.right >= nodes.size())) {
      throw Error("tree node points outside the node list");
    }
  }
  return DecisionTree(parse_criterion(j.at("criterion").get<std::string>()),
                      j.at("n_features").get<std::size_t>(), j.at("n_classes").get<std::size_t>(),
                      std::move(nodes));
}

json stump_to_json(const Stump& s) {
  return {{"feature", s.feature}, {"threshold", s.threshold}, {"left", s.left}, {"right", s.right}};
}

Stump stump_from_json(const json& j) {
  return Stump{j.at("feature").get<std::size_t>(), j.at("threshold").get<double>(),
               j.at("left").get<double>(), j.at("right").get<double>()};
}

}  // namespace

json to_json(const ModelSpec& spec) {
  json params = json::object();
  for (const auto& [key, value] : spec.params) {
    if (const double* d = std::get_if<double>(&value)) {
      params[key] = *d;
    } else {
      params[key] = std::get<std::string>(value);
    }
  }
  return {{"family", to_string(spec.family)}, {"params", params}};
}

ModelSpec model_spec_from_json(const json& j) {
  ModelSpec spec;
  spec.family = parse_model_family(j.at("family").get<std::string>());
  if (j.contains("params")) {
    for (const auto& [key, value] : j.at("params").items()) {
      if (value.is_number()) {
        spec.params[key] = value.get<double>();
      } else if (value.is_string()) {
        spec.params[key] = value.get<std::string>();
      } else {
        throw ConfigError("parameter '" + key + "' must be a number or a string");
      }
    }
  }
  spec.validate();
  return spec;
}

json to_json(const TrainedModel& model) {
  json params = json::object();
  json state = json::object();
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LinearModel>) {
          state = {{"bias", m.bias}, {"weights", m.weights}, {"iterations", m.iterations}};
        } else if constexpr (std::is_same_v<T, LogisticModel>) {
          params = {{"threshold", m.threshold}};
          state = {{"intercept", m.intercept}, {"coefficients", m.coefficients}, {"iterations", m.iterations}};
        } else if constexpr (std::is_same_v<T, DecisionTree>) {
          state = tree_to_json(m);
        } else if constexpr (std::is_same_v<T, AdaBoostModel>) {
          json stumps = json::array();
          for (std::size_t i = 0; i < m.stumps.size(); ++i) {
            json s = stump_to_json(m.stumps[i]);
            s["alpha"] = m.alphas[i];
            stumps.push_back(std::move(s));
          }
          json rounds = json::array();
          for (const auto& r : m.rounds) {
            rounds.push_back({{"stump", stump_to_json(r.stump)},
                              {"error", r.error},
                              {"alpha", r.alpha},
                              {"accepted", r.accepted}});
          }
          params = {{"rounds", m.rounds.size()}};
          state = {{"n_features", m.n_features}, {"stumps", stumps}, {"history", rounds}};
        } else if constexpr (std::is_same_v<T, GbmModel>) {
          json trees = json::array();
          for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
          params = {{"task", to_string(m.task)}, {"learning_rate", m.learning_rate}};
          state = {{"n_features", m.n_features}, {"init", m.init}, {"trees", trees}};
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          params = {{"k", m.params.k}, {"p", m.params.p}, {"feature_weights", m.params.feature_weights}};
          state = {{"X", matrix_to_json(m.X)}, {"y", m.y}};
        } else {
          params = {{"p", m.p}};
          state = {{"centroids", matrix_to_json(m.centroids)},
                   {"assignments", m.assignments},
                   {"objective_history", m.objective_history},
                   {"iterations", m.iterations}};
        }
      },
      model);
  return {{"kind", to_string(family_of(model))},
          {"version", kSchemaVersion},
          {"params", params},
          {"state", state}};
}

TrainedModel model_from_json(const json& j) {
  if (j.value("version", 0) != kSchemaVersion) {
    throw Error("unsupported model schema version " + j.value("version", json(nullptr)).dump());
  }
  const json& params = j.at("params");
  const json& state = j.at("state");
  switch (parse_model_family(j.at("kind").get<std::string>())) {
    case ModelFamily::linear: {
      LinearModel m;
      m.bias = state.at("bias").get<double>();
      m.weights = state.at("weights").get<std::vector<double>>();
      m.iterations = state.at("iterations").get<std::size_t>();
      return m;
    }
    case ModelFamily::logistic: {
      LogisticModel m;
      m.threshold = params.at("threshold").get<double>();
      m.intercept = state.at("intercept").get<double>();
      m.coefficients = state.at("coefficients").get<std::vector<double>>();
      m.iterations = state.at("iterations").get<std::size_t>();
      return m;
    }
    case ModelFamily::cart:
      return tree_from_json(state);
    case ModelFamily::adaboost: {
      AdaBoostModel m;
      m.n_features = state.at("n_features").get<std::size_t>();
      for (const json& s : state.at("stumps")) {
        m.stumps.push_back(stump_from_json(s));
        m.alphas.push_back(s.at("alpha").get<double>());
      }
      for (const json& r : state.at("history")) {
        m.rounds.push_back(AdaBoostRound{stump_from_json(r.at("stump")), r.at("error").get<double>(),
                                         r.at("alpha").get<double>(), r.at("accepted").get<bool>()});
      }
      return m;
    }
    case ModelFamily::gbm: {
      GbmModel m;
      m.task = parse_gbm_task(params.at("task").get<std::string>());
      m.learning_rate = params.at("learning_rate").get<double>();
      m.n_features = state.at("n_features").get<std::size_t>();
      m.init = state.at("init").get<double>();
      for (const json& t : state.at("trees")) m.trees.push_back(tree_from_json(t));
      return m;
    }
    case ModelFamily::knn: {
      KnnModel m;
      m.params.k = params.at("k").get<std::size_t>();
      m.params.p = params.at("p").get<double>();
      m.params.feature_weights = params.at("feature_weights").get<std::vector<double>>();
      m.X = matrix_from_json(state.at("X"));
      m.y = state.at("y").get<std::vector<double>>();
      if (m.y.size() != m.X.rows() || m.params.k < 1 || m.params.k > m.X.rows()) {
        throw Error("inconsistent KNN model file");
      }
      return m;
    }
    case ModelFamily::kmeans: {
      KmeansModel m;
      m.p = params.at("p").get<double>();
      m.centroids = matrix_from_json(state.at("centroids"));
      m.assignments = state.at("assignments").get<std::vector<std::size_t>>();
      m.objective_history = state.at("objective_history").get<std::vector<double>>();
      m.iterations = state.at("iterations").get<std::size_t>();
      return m;
    }
  }
  throw std::logic_error("unhandled model family");
}

}  // namespace cmml
