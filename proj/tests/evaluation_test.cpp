#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "cmml/engineering.hpp"
#include "cmml/error.hpp"
#include "cmml/evaluation/design.hpp"
#include "cmml/evaluation/gates.hpp"
#include "cmml/evaluation/metrics.hpp"
#include "cmml/evaluation/validation.hpp"
#include "support.hpp"

namespace cmml {
namespace {

// ---------------------------------------------------------------- metrics

TEST(Confusion, HandCount) {
  const std::vector<double> y{1, 1, 0, 0}, p{1, 0, 0, 1};
  EXPECT_EQ(confusion(y, p), (ConfusionMatrix{1, 1, 1, 1}));
  EXPECT_EQ(confusion(y, y), (ConfusionMatrix{2, 0, 2, 0}));
  const std::vector<double> neg{0, 0, 0}, pos{1, 1, 1};
  EXPECT_EQ(confusion(neg, pos), (ConfusionMatrix{0, 3, 0, 0}));
  EXPECT_THROW(confusion(y, neg), std::invalid_argument);
  EXPECT_THROW(confusion(std::vector<double>{2}, std::vector<double>{1}), std::invalid_argument);
  EXPECT_THROW(confusion(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST(ClassificationMetrics, HandArithmetic) {
  const MetricSet m = classification_metrics(ConfusionMatrix{50, 20, 80, 10});
  EXPECT_NEAR(*m.sensitivity, 50.0 / 60.0, 1e-12);
  EXPECT_NEAR(*m.specificity, 0.8, 1e-12);
  EXPECT_NEAR(*m.precision, 50.0 / 70.0, 1e-12);
  EXPECT_NEAR(*m.f1, 2.0 * (50.0 / 70.0) * (50.0 / 60.0) / (50.0 / 70.0 + 50.0 / 60.0), 1e-12);
  EXPECT_NEAR(*m.f1, 0.7692, 5e-5);
  EXPECT_NEAR(*m.accuracy, 0.8125, 1e-12);
  EXPECT_EQ(m.recall, m.sensitivity);
}

TEST(ClassificationMetrics, PerfectAndDegenerate) {
  const MetricSet perfect = classification_metrics(ConfusionMatrix{5, 0, 7, 0});
  for (const char* name : {"sensitivity", "specificity", "precision", "recall", "f1", "accuracy"}) {
    EXPECT_EQ(perfect.get(name), 1.0) << name;
  }
  const MetricSet none = classification_metrics(ConfusionMatrix{0, 0, 4, 2});
  EXPECT_FALSE(none.precision.has_value());
  EXPECT_FALSE(none.f1.has_value());
  EXPECT_EQ(none.sensitivity, 0.0);
  EXPECT_THROW(none.get("bogus"), std::invalid_argument);
}

TEST(Auc, RankStatistic) {
  const std::vector<double> y{0, 0, 1, 1}, s{0.1, 0.4, 0.35, 0.8};
  EXPECT_DOUBLE_EQ(*auc(y, s), 0.75);
  const std::vector<double> ties{0.5, 0.5, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(*auc(y, ties), 0.5);
  EXPECT_FALSE(auc(std::vector<double>{1, 1}, std::vector<double>{0.2, 0.3}).has_value());
}

TEST(CrossEntropy, KnownValues) {
  const std::vector<double> p{0.2, 0.8};
  EXPECT_NEAR(cross_entropy_kl(p, p).kl, 0.0, 1e-15);
  EXPECT_NEAR(cross_entropy_kl(p, p).h_pq, shannon_entropy(p), 1e-15);
  const std::vector<double> one{1.0, 0.0}, half{0.5, 0.5};
  EXPECT_NEAR(cross_entropy_kl(one, half).kl, std::numbers::ln2, 1e-12);
  EXPECT_THROW(cross_entropy_kl(one, std::vector<double>{1.0}), std::invalid_argument);
  EXPECT_THROW(cross_entropy_kl(std::vector<double>{0.5, 0.6}, half), std::invalid_argument);
}

TEST(Regression, R2AndErrors) {
  const std::vector<double> y{1, 2, 3};
  EXPECT_DOUBLE_EQ(r2(y, y), 1.0);
  EXPECT_DOUBLE_EQ(r2(y, std::vector<double>{2, 2, 2}), 0.0);
  EXPECT_DOUBLE_EQ(r2(y, std::vector<double>{1, 2, 4}), 0.5);
  EXPECT_THROW(r2(std::vector<double>{4, 4}, std::vector<double>{4, 4}), std::invalid_argument);
  EXPECT_THROW(r2(std::vector<double>{4}, std::vector<double>{4}), std::invalid_argument);
  EXPECT_DOUBLE_EQ(mse(y, std::vector<double>{1, 2, 6}), 3.0);
  EXPECT_DOUBLE_EQ(mae(y, std::vector<double>{1, 2, 6}), 1.0);
  const MetricSet m = regression_metrics(y, std::vector<double>{1, 2, 4});
  EXPECT_DOUBLE_EQ(*m.r2, 0.5);
  EXPECT_FALSE(m.accuracy.has_value());
}

TEST(MetricSet, JsonRoundTrip) {
  MetricSet m = classification_metrics(ConfusionMatrix{0, 0, 4, 2});
  m.auc = 0.61;
  const MetricSet back = metric_set_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ(back, m);
}

// ---------------------------------------------------------------- design

TEST(Design, FeatureMatrixErrors) {
  const Dataset d = test::numeric_dataset({{1.0, 2.0}}, {0.0, 1.0});
  EXPECT_EQ(model_features(d, "y"), std::vector<std::string>{"x0"});
  const std::vector<std::string> x0{"x0"};
  EXPECT_EQ(feature_matrix(d, x0)(1, 0), 2.0);

  const Dataset gap = d.with_replaced_column("x0", {1.0, Missing{}});
  try {
    feature_matrix(gap, x0);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.row(), 1u);
    EXPECT_NE(std::string(e.what()).find("x0"), std::string::npos);
  }
  const Dataset cat = d.with_column({"c", FeatureKind::categorical, "", FeatureRole::input, {}},
                                    {std::string("a"), std::string("b")});
  EXPECT_EQ(model_features(cat, "y"), std::vector<std::string>{"x0"});
  const std::vector<std::string> c{"c"};
  EXPECT_THROW(feature_matrix(cat, c), DataError);
}

// ---------------------------------------------------------------- k-fold

TEST(Kfold, LeaveOneOut) {
  const auto folds = kfold_indices(3, 3, 1);
  ASSERT_EQ(folds.size(), 3u);
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    ASSERT_EQ(f.size(), 1u);
    seen.insert(f[0]);
  }
  EXPECT_EQ(seen.size(), 3u);
  EXPECT_EQ(kfold_indices(50, 5, 9), kfold_indices(50, 5, 9));
  EXPECT_NE(kfold_indices(50, 5, 9), kfold_indices(50, 5, 10));
  EXPECT_THROW(kfold_indices(3, 4, 0), Error);
  EXPECT_THROW(kfold_indices(3, 1, 0), std::invalid_argument);
}

Dataset noisy_classification(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> a, b, y;
  for (std::size_t i = 0; i < n; ++i) {
    a.push_back(rng.uniform() * 4.0 - 2.0);
    b.push_back(rng.uniform() * 4.0 - 2.0);
    y.push_back(a.back() - 0.5 * b.back() + 0.8 * (rng.uniform() - 0.5) > 0 ? 1.0 : 0.0);
  }
  return test::numeric_dataset({a, b}, y);
}

ValidationOptions classification_options(std::size_t k = 5, std::uint64_t seed = 3) {
  return ValidationOptions{"y", Task::classification, k, seed, RecipeFit::per_fold};
}

TEST(Kfold, LeaveOneOutRunsOneRowFolds) {
  const Dataset d = test::numeric_dataset({{0.0, 1.0, 2.0, 3.0}}, {0.0, 0.0, 1.0, 1.0});
  const CvResult cv = kfold_cv(d, ModelSpec{ModelFamily::knn, {{"k", 1.0}}}, {}, classification_options(4));
  ASSERT_EQ(cv.folds.size(), 4u);
  for (const FoldResult& f : cv.folds) EXPECT_EQ(f.test_rows.size(), 1u);
  EXPECT_EQ(cv.summary.defined.at("accuracy"), 4u);
}

TEST(Kfold, SummaryAveragesFolds) {
  const Dataset d = noisy_classification(120, 4);
  const CvResult cv = kfold_cv(d, ModelSpec{ModelFamily::logistic, {}}, {}, classification_options());
  ASSERT_EQ(cv.folds.size(), 5u);
  double sum = 0.0;
  for (const FoldResult& f : cv.folds) sum += *f.metrics.accuracy;
  EXPECT_NEAR(*cv.summary.mean_of("accuracy"), sum / 5.0, 1e-12);
  EXPECT_GT(*cv.summary.mean_of("accuracy"), 0.8);
  EXPECT_TRUE(cv.summary.mean_of("auc").has_value());
  const CvResult again = kfold_cv(d, ModelSpec{ModelFamily::logistic, {}}, {}, classification_options());
  EXPECT_EQ(to_json(again.summary), to_json(cv.summary));
}

TEST(Kfold, RecipeFitsInsideEachFold) {
  // Every training fold sees a different mean, so per-fold and global imputation disagree.
  Dataset d = noisy_classification(60, 8);
  Column x0 = d.column("x0");
  for (std::size_t i = 0; i < x0.size(); i += 3) x0[i] = Missing{};
  d = d.with_replaced_column("x0", x0);
  engineering::EngineeringRecipe recipe;
  recipe.steps.emplace_back(engineering::ImputeStep{"x0", engineering::ImputeStrategy::mean, Missing{}});
  recipe.steps.emplace_back(engineering::ScaleStep{{}, engineering::ScaleMethod::zscore});
  const ModelSpec knn{ModelFamily::knn, {{"k", 3.0}}};
  ValidationOptions per_fold = classification_options();
  ValidationOptions global = per_fold;
  global.recipe_fit = RecipeFit::global;
  const CvResult a = kfold_cv(d, knn, recipe, per_fold);
  const CvResult b = kfold_cv(d, knn, recipe, global);
  EXPECT_EQ(a.folds.size(), b.folds.size());
  for (std::size_t f = 0; f < a.folds.size(); ++f) EXPECT_EQ(a.folds[f].test_rows, b.folds[f].test_rows);
  EXPECT_THROW(kfold_cv(d, knn, {}, per_fold), DataError);
}

TEST(Kfold, RegressionMetrics) {
  Rng rng(2);
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(rng.uniform());
    y.push_back(3.0 * x.back() + 0.1 * rng.uniform());
  }
  const Dataset d = test::numeric_dataset({x}, y, FeatureKind::numeric);
  ValidationOptions opts{"y", Task::regression, 4, 1, RecipeFit::per_fold};
  const CvResult cv = kfold_cv(d, ModelSpec{ModelFamily::linear, {{"max_iters", 5000.0}, {"step_size", 0.5}}}, {}, opts);
  EXPECT_GT(*cv.summary.mean_of("r2"), 0.9);
  EXPECT_FALSE(cv.summary.mean_of("accuracy").has_value());
}

// ---------------------------------------------------------------- bootstrap

TEST(Bootstrap, UniqueFractionNearOneMinusInverseE) {
  const Dataset d = noisy_classification(200, 6);
  ValidationOptions opts = classification_options();
  const BootstrapResult r = bootstrap_eval(d, ModelSpec{ModelFamily::cart, {{"max_depth", 2.0}}}, 60, opts);
  double mean = 0.0;
  for (double u : r.unique_fractions) mean += u;
  mean /= static_cast<double>(r.unique_fractions.size());
  EXPECT_NEAR(mean, 1.0 - std::exp(-1.0), 0.02);
  EXPECT_EQ(r.iterations.size() + r.skipped, 60u);
}

TEST(Bootstrap, DeterministicForSeed) {
  const Dataset d = noisy_classification(50, 7);
  const ModelSpec spec{ModelFamily::logistic, {}};
  const BootstrapResult a = bootstrap_eval(d, spec, 1, classification_options());
  const BootstrapResult b = bootstrap_eval(d, spec, 1, classification_options());
  ASSERT_EQ(a.iterations.size(), 1u);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(to_json(bootstrap_eval(d, spec, 5, classification_options()).summary),
            to_json(bootstrap_eval(d, spec, 5, classification_options()).summary));
}

TEST(Bootstrap, TinyDatasetSkipsEmptyOutOfBag) {
  const Dataset d = test::numeric_dataset({{0.0, 1.0}}, {0.0, 1.0});
  const BootstrapResult r = bootstrap_eval(d, ModelSpec{ModelFamily::knn, {{"k", 1.0}}}, 40, classification_options());
  EXPECT_GT(r.skipped, 0u);
  EXPECT_EQ(r.iterations.size() + r.skipped, 40u);
}

// ---------------------------------------------------------------- grid search

TEST(Grid, ExpandOrder) {
  ParamGrid g{ModelFamily::gbm, {{"rounds", {10.0, 20.0}}, {"max_depth", {1.0, 2.0, 3.0}}}};
  const std::vector<ModelSpec> specs = expand(g);
  ASSERT_EQ(specs.size(), 6u);
  EXPECT_EQ(specs[0].label(), "gbm(max_depth=1, rounds=10)");
  EXPECT_EQ(specs[1].label(), "gbm(max_depth=1, rounds=20)");
  EXPECT_EQ(specs[5].label(), "gbm(max_depth=3, rounds=20)");
  EXPECT_EQ(expand(ParamGrid{ModelFamily::cart, {}}).size(), 1u);
}

TEST(Grid, KnnNeighbourhoodSearch) {
  const Dataset d = noisy_classification(90, 11);
  std::vector<GridCell> cells;
  for (const ModelSpec& s : expand(ParamGrid{ModelFamily::knn, {{"k", {4.0, 5.0, 6.0, 7.0}}}})) cells.push_back({s, {}});
  const GridSearchResult r = grid_search(d, cells, "accuracy", classification_options());
  ASSERT_EQ(r.leaderboard.size(), 4u);
  const double k = r.best().spec.number("k", 0);
  EXPECT_TRUE(k >= 4 && k <= 7);
  for (std::size_t i = 1; i < r.leaderboard.size(); ++i) {
    EXPECT_GE(*r.leaderboard[i - 1].score, *r.leaderboard[i].score);
  }
  // Scores are exactly the individual cross-validation results.
  std::vector<double> individual, board;
  for (const GridCell& c : cells) individual.push_back(*kfold_cv(d, c.spec, {}, classification_options()).summary.mean_of("accuracy"));
  for (const auto& e : r.leaderboard) board.push_back(*e.score);
  std::sort(individual.begin(), individual.end());
  std::sort(board.begin(), board.end());
  EXPECT_EQ(individual, board);
}

TEST(Grid, TiesPreferShallowerTrees) {
  // One split separates the classes, so every depth scores the same.
  const Dataset d = test::numeric_dataset({{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}}, {0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
  std::vector<GridCell> cells;
  for (double depth : {3.0, 1.0, 2.0}) cells.push_back({ModelSpec{ModelFamily::cart, {{"max_depth", depth}}}, {}});
  const GridSearchResult r = grid_search(d, cells, "accuracy", classification_options(2));
  EXPECT_EQ(r.best().spec.number("max_depth", 0), 1.0);
  EXPECT_EQ(r.best().grid_index, 1u);
  EXPECT_EQ(r.leaderboard[1].spec.number("max_depth", 0), 2.0);
}

TEST(Grid, SingleCellAndFailures) {
  const Dataset d = noisy_classification(30, 1);
  const GridCell good{ModelSpec{ModelFamily::logistic, {}}, {}};
  const GridCell bad{ModelSpec{ModelFamily::knn, {{"k", 500.0}}}, {}};
  const GridSearchResult r = grid_search(d, {bad, good}, "accuracy", classification_options());
  ASSERT_EQ(r.leaderboard.size(), 2u);
  EXPECT_EQ(r.best().spec, good.spec);
  EXPECT_TRUE(r.leaderboard[1].error.has_value());
  EXPECT_FALSE(r.leaderboard[1].score.has_value());
}

// ---------------------------------------------------------------- gates

std::vector<PerformanceGate> reference_gates() {
  return {{"sensitivity", constraints::CmpOp::ge, 0.78, Severity::hard},
          {"specificity", constraints::CmpOp::ge, 0.77, Severity::soft}};
}

TEST(Gates, ReferenceThresholds) {
  MetricSet ok;
  ok.sensitivity = 0.84;
  ok.specificity = 0.77;
  EXPECT_TRUE(gate_check(ok, reference_gates()).passed);

  MetricSet low;
  low.sensitivity = 0.70;
  low.specificity = 0.90;
  const GateReport r = gate_check(low, reference_gates());
  EXPECT_FALSE(r.passed);
  ASSERT_EQ(r.violations().size(), 1u);
  EXPECT_EQ(r.violations()[0].metric, "sensitivity");
  EXPECT_EQ(r.violations()[0].label(), "sensitivity >= 0.78 (hard)");
}

TEST(Gates, AccuracyHardGateAndSoftWarnings) {
  MetricSet m;
  m.accuracy = 0.70;
  const std::vector<PerformanceGate> hard{{"accuracy", constraints::CmpOp::ge, 0.74, Severity::hard}};
  EXPECT_FALSE(gate_check(m, hard).passed);
  const std::vector<PerformanceGate> soft{{"accuracy", constraints::CmpOp::ge, 0.74, Severity::soft}};
  const GateReport s = gate_check(m, soft);
  EXPECT_TRUE(s.passed);
  EXPECT_EQ(s.warnings().size(), 1u);
  EXPECT_TRUE(gate_check(m, {}).passed);
}

TEST(Gates, UndefinedMetricNeverSatisfies) {
  const std::vector<PerformanceGate> g{{"precision", constraints::CmpOp::le, 1.0, Severity::hard}};
  const GateReport r = gate_check(MetricSet{}, g);
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.outcomes[0].observed.has_value());
}

TEST(Gates, ValidationAndJson) {
  PerformanceGate out_of_range{"sensitivity", constraints::CmpOp::ge, 1.5, Severity::hard};
  EXPECT_THROW(out_of_range.validate(), std::invalid_argument);
  PerformanceGate unknown{"youden", constraints::CmpOp::ge, 0.5, Severity::hard};
  EXPECT_THROW(unknown.validate(), std::invalid_argument);
  PerformanceGate r2_gate{"r2", constraints::CmpOp::ge, -3.0, Severity::soft};
  EXPECT_NO_THROW(r2_gate.validate());

  const PerformanceGate g = gate_from_json(nlohmann::json::parse(R"({"metric": "specificity", "threshold": 0.77})"));
  EXPECT_EQ(g.comparator, constraints::CmpOp::ge);
  EXPECT_EQ(g.severity, Severity::hard);
  EXPECT_THROW(gate_from_json(nlohmann::json::parse(R"({"metric": "f1", "threshold": 2})")), ConfigError);
  EXPECT_THROW(gate_from_json(nlohmann::json::parse(R"({"metric": "f1", "threshold": 0.5, "severity": "mild"})")),
               ConfigError);
}

// ---------------------------------------------------------------- fit curve

Dataset noisy_polynomial(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n; ++i) {
    x.push_back(rng.uniform() * 4.0 - 2.0);
    y.push_back(x.back() * x.back() * x.back() - 2.0 * x.back() + 0.8 * (rng.uniform() - 0.5));
  }
  return test::numeric_dataset({x}, y, FeatureKind::numeric);
}

TEST(FitCurve, TreeDepthLadder) {
  const Dataset d = noisy_polynomial(120, 5);
  std::vector<ModelSpec> ladder;
  for (int depth = 1; depth <= 10; ++depth) ladder.push_back({ModelFamily::cart, {{"max_depth", double(depth)}}});
  ValidationOptions opts{"y", Task::regression, 5, 13, RecipeFit::per_fold};
  const std::vector<CurvePoint> curve = fit_curve(d, ladder, opts);
  ASSERT_EQ(curve.size(), 10u);
  double min_test = curve[0].test_loss;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_LE(curve[i].train_loss, curve[i - 1].train_loss + 1e-12);
    min_test = std::min(min_test, curve[i].test_loss);
  }
  EXPECT_GE(curve.back().test_loss, min_test);
  EXPECT_THROW(fit_curve(d, {ladder[0]}, opts), std::invalid_argument);
}

TEST(FitCurve, UnboundedTreeMemorizes) {
  const Dataset d = noisy_polynomial(120, 5);
  const std::vector<ModelSpec> ladder{{ModelFamily::cart, {{"max_depth", 1.0}}},
                                      {ModelFamily::cart, {{"max_depth", 200.0}}}};
  ValidationOptions opts{"y", Task::regression, 5, 13, RecipeFit::per_fold};
  const std::vector<CurvePoint> curve = fit_curve(d, ladder, opts);
  EXPECT_EQ(curve.back().train_loss, 0.0);
  EXPECT_GT(curve.back().test_loss, 0.0);
  EXPECT_GT(curve.front().train_loss, 0.0);
}

}  // namespace
}  // namespace cmml
