#include "cmml/evaluation/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "cmml/error.hpp"
#include "cmml/evaluation/design.hpp"
#include "cmml/random.hpp"

namespace cmml {

std::string_view to_string(RecipeFit mode) { return mode == RecipeFit::global ? "global" : "per_fold"; }

std::optional<double> MetricSummary::mean_of(const std::string& metric) const {
  auto it = mean.find(metric);
  if (it == mean.end()) return std::nullopt;
  return it->second;
}

MetricSet MetricSummary::means() const {
  MetricSet m;
  for (const auto& [name, value] : mean) m.set(name, value);
  return m;
}

MetricSummary summarize(const std::vector<MetricSet>& sets) {
  MetricSummary s;
  for (const std::string& name : MetricSet::names()) {
    std::vector<double> values;
    for (const MetricSet& m : sets) {
      if (auto v = m.get(name)) values.push_back(*v);
    }
    if (values.empty()) continue;
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    s.mean[name] = mean;
    s.std[name] = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.defined[name] = values.size();
  }
  return s;
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (k > n) {
    throw Error("cannot cut " + std::to_string(n) + " rows into " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> idx = iota_indices(n);
  Rng rng(seed);
  rng.shuffle(idx);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos),
                    idx.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

namespace {

// Distinct, reproducible seed per resample.
std::uint64_t derived_seed(std::uint64_t seed, std::size_t index) {
  return seed * 0x9E3779B97F4A7C15ULL + index + 1;
}

struct Prepared {
  Dataset train;
  Dataset test;
};

Prepared prepare(const Dataset& d, const engineering::EngineeringRecipe& recipe,
                 std::span<const std::size_t> train_rows, std::span<const std::size_t> test_rows) {
  Dataset train = d.select_rows(train_rows);
  Dataset test = d.select_rows(test_rows);
  if (recipe.steps.empty()) return {std::move(train), std::move(test)};
  auto [fitted, engineered] = engineering::fit_transform(recipe, train);
  return {std::move(engineered), fitted.apply(test)};
}

struct Predictions {
  std::vector<double> truth;
  std::vector<double> labels;
  std::vector<double> scores;
};

Predictions train_and_predict(const Prepared& data, const ModelSpec& spec, const ValidationOptions& options,
                              std::uint64_t model_seed) {
  const auto features = model_features(data.train, options.target);
  const Matrix X = feature_matrix(data.train, features);
  const auto y = target_vector(data.train, options.target);
  const TrainedModel model = fit(spec, X, y, options.task, model_seed);

  Predictions out;
  const Matrix Xt = feature_matrix(data.test, features);
  out.truth = target_vector(data.test, options.target);
  for (std::size_t i = 0; i < Xt.rows(); ++i) {
    const Prediction p = predict(model, Xt.row(i));
    out.labels.push_back(p.label);
    out.scores.push_back(p.score);
  }
  return out;
}

MetricSet score(const Predictions& p, Task task) {
  if (task == Task::regression) return regression_metrics(p.truth, p.labels);
  MetricSet m = classification_metrics(confusion(p.truth, p.labels));
  m.auc = auc(p.truth, p.scores);
  return m;
}

std::vector<std::size_t> complement(std::size_t n, std::span<const std::size_t> rows) {
  std::vector<bool> in(n, false);
  for (std::size_t r : rows) in[r] = true;
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < n; ++r) {
    if (!in[r]) out.push_back(r);
  }
  return out;
}

}  // namespace

MetricSet evaluate_split(const Dataset& d, const ModelSpec& spec, const engineering::EngineeringRecipe& recipe,
                         std::span<const std::size_t> train_rows, std::span<const std::size_t> test_rows,
                         const ValidationOptions& options, std::uint64_t model_seed) {
  if (train_rows.empty() || test_rows.empty()) throw std::invalid_argument("train and test rows must be non-empty");
  return score(train_and_predict(prepare(d, recipe, train_rows, test_rows), spec, options, model_seed),
               options.task);
}

CvResult kfold_cv(const Dataset& d, const ModelSpec& spec, const engineering::EngineeringRecipe& recipe,
                  const ValidationOptions& options) {
  const auto folds = kfold_indices(d.n_rows(), options.k, options.seed);
  const engineering::EngineeringRecipe none;
  Dataset source = d;
  if (options.recipe_fit == RecipeFit::global) source = engineering::fit_transform(recipe, d).second;
  const engineering::EngineeringRecipe& per_fold = options.recipe_fit == RecipeFit::global ? none : recipe;

  CvResult result;
  std::vector<MetricSet> sets;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto train_rows = complement(d.n_rows(), folds[f]);
    FoldResult fold;
    fold.test_rows = folds[f];
    fold.metrics = evaluate_split(source, spec, per_fold, train_rows, folds[f], options,
                                  derived_seed(options.seed, f));
    sets.push_back(fold.metrics);
    result.folds.push_back(std::move(fold));
  }
  result.summary = summarize(sets);
  return result;
}

BootstrapResult bootstrap_eval(const Dataset& d, const ModelSpec& spec, std::size_t iterations,
                               const ValidationOptions& options, const engineering::EngineeringRecipe& recipe) {
  if (iterations < 1) throw std::invalid_argument("bootstrap needs at least one iteration");
  const std::size_t n = d.n_rows();
  if (n == 0) throw std::invalid_argument("cannot bootstrap an empty dataset");
  Rng rng(options.seed);
  BootstrapResult result;
  for (std::size_t b = 0; b < iterations; ++b) {
    std::vector<std::size_t> sample(n);
    for (std::size_t& r : sample) r = rng.below(n);
    const std::set<std::size_t> unique(sample.begin(), sample.end());
    result.unique_fractions.push_back(static_cast<double>(unique.size()) / static_cast<double>(n));
    std::sort(sample.begin(), sample.end());
    const auto oob = complement(n, sample);
    if (oob.empty()) {
      ++result.skipped;
      continue;
    }
    result.iterations.push_back(evaluate_split(d, spec, recipe, sample, oob, options, derived_seed(options.seed, b)));
  }
  result.summary = summarize(result.iterations);
  return result;
}

std::vector<ModelSpec> expand(const ParamGrid& grid) {
  std::vector<ModelSpec> out{ModelSpec{grid.family, {}}};
  for (const auto& [key, values] : grid.axes) {
    if (values.empty()) throw std::invalid_argument("grid axis '" + key + "' has no values");
    std::vector<ModelSpec> next;
    for (const ModelSpec& base : out) {
      for (const ParamValue& v : values) {
        ModelSpec s = base;
        s.params[key] = v;
        next.push_back(std::move(s));
      }
    }
    out = std::move(next);
  }
  return out;
}

const LeaderboardEntry& GridSearchResult::best() const {
  if (leaderboard.empty()) throw std::logic_error("empty leaderboard");
  return leaderboard.front();
}

GridSearchResult grid_search(const Dataset& d, const std::vector<GridCell>& grid, const std::string& metric,
                             const ValidationOptions& options) {
  if (grid.empty()) throw std::invalid_argument("grid search needs at least one cell");
  (void)metric_range(metric);
  GridSearchResult result;
  result.metric = metric;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    LeaderboardEntry e;
    e.grid_index = i;
    e.spec = grid[i].spec;
    try {
      e.cv = kfold_cv(d, grid[i].spec, grid[i].recipe, options);
      e.score = e.cv.summary.mean_of(metric);
    } catch (const Error& ex) {
      e.error = ex.what();
    } catch (const std::invalid_argument& ex) {
      e.error = ex.what();
    }
    result.leaderboard.push_back(std::move(e));
  }
  const bool lower_is_better = metric == "mse" || metric == "mae";
  std::stable_sort(result.leaderboard.begin(), result.leaderboard.end(),
                   [&](const LeaderboardEntry& a, const LeaderboardEntry& b) {
                     if (a.score.has_value() != b.score.has_value()) return a.score.has_value();
                     if (a.score && *a.score != *b.score) {
                       return lower_is_better ? *a.score < *b.score : *a.score > *b.score;
                     }
                     const double ra = a.spec.number("rounds", 0.0), rb = b.spec.number("rounds", 0.0);
                     if (ra != rb) return ra < rb;
                     const double da = a.spec.number("max_depth", 0.0), db = b.spec.number("max_depth", 0.0);
                     if (da != db) return da < db;
                     return a.grid_index < b.grid_index;
                   });
  return result;
}

std::vector<CurvePoint> fit_curve(const Dataset& d, const std::vector<ModelSpec>& ladder,
                                  const ValidationOptions& options, const engineering::EngineeringRecipe& recipe) {
  if (ladder.size() < 2) throw std::invalid_argument("a fit curve needs at least two capacity points");
  const std::size_t n = d.n_rows();
  const std::size_t n_train = static_cast<std::size_t>(std::llround(0.7 * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) throw std::invalid_argument("too few rows for a train/test split");
  std::vector<std::size_t> idx = iota_indices(n);
  Rng rng(options.seed);
  rng.shuffle(idx);
  std::vector<std::size_t> train_rows(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_rows(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  const Prepared data = prepare(d, recipe, train_rows, test_rows);

  auto loss = [&](std::span<const double> truth, std::span<const double> predicted) {
    if (options.task == Task::regression) return mse(truth, predicted);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) wrong += truth[i] != predicted[i] ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(truth.size());
  };

  std::vector<CurvePoint> out;
  for (const ModelSpec& spec : ladder) {
    const Predictions on_test = train_and_predict(data, spec, options, options.seed);
    const Predictions on_train = train_and_predict(Prepared{data.train, data.train}, spec, options, options.seed);
    out.push_back(CurvePoint{spec, loss(on_train.truth, on_train.labels), loss(on_test.truth, on_test.labels)});
  }
  return out;
}

nlohmann::ordered_json to_json(const MetricSummary& s) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const std::string& name : MetricSet::names()) {
    auto it = s.mean.find(name);
    if (it == s.mean.end()) continue;
    j[name] = {{"mean", it->second}, {"std", s.std.at(name)}, {"defined_folds", s.defined.at(name)}};
  }
  return j;
}

}  // namespace cmml
