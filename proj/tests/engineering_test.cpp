#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cmml/constraints/parser.hpp"
#include "cmml/engineering.hpp"
#include "cmml/error.hpp"
#include "support.hpp"

namespace cmml::engineering {
namespace {

using test::pima;

Dataset categorical(Column values) {
  return test::single_column("c", std::move(values), FeatureKind::categorical);
}

// ---------------------------------------------------------------- impute

TEST(Impute, MeanFillsGap) {
  const Dataset d = test::single_column("v", {1.0, Missing{}, 3.0});
  EXPECT_EQ(impute(d, "v", ImputeStrategy::mean).column("v"), (Column{1.0, 2.0, 3.0}));
}

TEST(Impute, MedianIgnoresOutlier) {
  const Dataset d = test::single_column("v", {1.0, Missing{}, 3.0, 100.0});
  EXPECT_EQ(impute(d, "v", ImputeStrategy::median).column("v")[1], Cell{3.0});
}

TEST(Impute, MostFrequentAndConstant) {
  const Dataset c = categorical({std::string("b"), Missing{}, std::string("a"), std::string("b")});
  EXPECT_EQ(impute(c, "c", ImputeStrategy::most_frequent).column("c")[1], Cell{std::string("b")});
  const Dataset v = test::single_column("v", {Missing{}, 4.0});
  EXPECT_EQ(impute(v, "v", ImputeStrategy::constant, Cell{-1.0}).column("v")[0], Cell{-1.0});
  EXPECT_THROW(impute(v, "v", ImputeStrategy::constant), std::invalid_argument);
}

TEST(Impute, AllMissingNeedsAStatistic) {
  const Dataset d = test::single_column("v", {Missing{}, Missing{}});
  EXPECT_THROW(impute(d, "v", ImputeStrategy::mean), Error);
  EXPECT_EQ(impute(d, "v", ImputeStrategy::constant, Cell{0.0}).column("v"), (Column{0.0, 0.0}));
}

TEST(Impute, MeanImputationPreservesPimaGlucoseMean) {
  const std::vector<std::string> names{"Glucose"};
  const Dataset marked = mark_missing_zeros(pima(), names);
  const Dataset filled = impute(marked, "Glucose", ImputeStrategy::mean);
  const double before = *descriptive_stats(marked).at("Glucose").mean;
  const FeatureStats& after = descriptive_stats(filled).at("Glucose");
  EXPECT_EQ(after.missing_fraction, 0.0);
  EXPECT_NEAR(*after.mean, before, 1e-9);
}

TEST(Impute, NeverTouchesPresentCells) {
  const Dataset marked = mark_missing_zeros(pima(), std::vector<std::string>{"Insulin"});
  const Dataset filled = impute(marked, "Insulin", ImputeStrategy::median);
  const Column& a = marked.column("Insulin");
  const Column& b = filled.column("Insulin");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!is_missing(a[i])) EXPECT_EQ(a[i], b[i]);
  }
  EXPECT_EQ(marked, mark_missing_zeros(pima(), std::vector<std::string>{"Insulin"}));
}

// ---------------------------------------------------------------- scale

TEST(Scale, MinMax) {
  const Dataset d = test::single_column("v", {0.0, 5.0, 10.0});
  const std::vector<std::string> f{"v"};
  const auto [out, params] = scale(d, f, ScaleMethod::minmax);
  EXPECT_EQ(test::numbers(out, "v"), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_DOUBLE_EQ(params.apply("v", 5.0), 0.5);
  EXPECT_DOUBLE_EQ(params.apply("v", 20.0), 2.0);
}

TEST(Scale, ZScoreUsesSampleStd) {
  const Dataset d = test::single_column("v", {2.0, 4.0, 6.0});
  const std::vector<std::string> f{"v"};
  EXPECT_EQ(test::numbers(scale(d, f, ScaleMethod::zscore).first, "v"), (std::vector<double>{-1.0, 0.0, 1.0}));
}

TEST(Scale, RejectsConstantAndMissing) {
  const std::vector<std::string> f{"v"};
  EXPECT_THROW(scale(test::single_column("v", {3.0, 3.0}), f, ScaleMethod::minmax), Error);
  EXPECT_THROW(scale(test::single_column("v", {3.0, 3.0}), f, ScaleMethod::zscore), Error);
  EXPECT_THROW(scale(test::single_column("v", {3.0, Missing{}}), f, ScaleMethod::zscore), Error);
}

TEST(Scale, EmptyListScalesNumericInputsOnly) {
  const Dataset d = test::numeric_dataset({{1.0, 2.0, 3.0}, {10.0, 20.0, 60.0}}, {0.0, 1.0, 1.0});
  const auto [out, params] = scale(d, {}, ScaleMethod::minmax);
  ASSERT_EQ(params.entries.size(), 2u);
  EXPECT_EQ(out.column("y"), d.column("y"));
  EXPECT_DOUBLE_EQ(test::numbers(out, "x1")[1], 0.2);
}

// ---------------------------------------------------------------- one-hot

TEST(OneHot, TwoCategories) {
  const Dataset out = one_hot(categorical({std::string("a"), std::string("b"), std::string("a")}), "c");
  EXPECT_EQ(out.column("c=a"), (Column{1.0, 0.0, 1.0}));
  EXPECT_EQ(out.column("c=b"), (Column{0.0, 1.0, 0.0}));
  EXPECT_EQ(out.feature("c=a").kind, FeatureKind::binary);
  EXPECT_EQ(out.feature("c").role, FeatureRole::excluded);
}

TEST(OneHot, SingleCategoryAndMissingRows) {
  const Dataset one = one_hot(categorical({std::string("z"), std::string("z")}), "c");
  EXPECT_EQ(one.column("c=z"), (Column{1.0, 1.0}));
  const Dataset gap = one_hot(categorical({std::string("q"), Missing{}, std::string("p")}), "c");
  EXPECT_EQ(gap.feature(1).name, "c=p");
  EXPECT_EQ(gap.column("c=p"), (Column{0.0, Missing{}, 1.0}));
  EXPECT_EQ(gap.column("c=q"), (Column{1.0, Missing{}, 0.0}));
}

TEST(OneHot, UnseenCategoryEncodesAsAllZeros) {
  const Dataset train = categorical({std::string("a"), std::string("b")});
  const std::vector<std::string> cats = one_hot_categories(train, "c");
  const Dataset test = apply_one_hot(categorical({std::string("c")}), "c", cats);
  EXPECT_EQ(test.column("c=a"), (Column{0.0}));
  EXPECT_EQ(test.column("c=b"), (Column{0.0}));
}

TEST(OneHot, NumericFeatureRejected) {
  EXPECT_THROW(one_hot(test::single_column("v", {1.0}), "v"), std::invalid_argument);
}

// ---------------------------------------------------------------- recipes

EngineeringRecipe pima_recipe() {
  EngineeringRecipe r;
  r.steps.emplace_back(MarkZerosStep{{"Glucose", "BloodPressure", "SkinThickness", "Insulin", "BMI"}});
  r.steps.emplace_back(ImputeStep{"Glucose", ImputeStrategy::mean, Missing{}});
  r.steps.emplace_back(ImputeStep{"BloodPressure", ImputeStrategy::mean, Missing{}});
  r.steps.emplace_back(ImputeStep{"SkinThickness", ImputeStrategy::median, Missing{}});
  r.steps.emplace_back(ImputeStep{"BMI", ImputeStrategy::median, Missing{}});
  r.steps.emplace_back(ImputeStep{"Insulin", ImputeStrategy::median, Missing{}});
  r.steps.emplace_back(DeriveStep{constraints::parse("derive kl1: Age < 30 and Glucose < 120")});
  r.steps.emplace_back(ScaleStep{{}, ScaleMethod::zscore});
  return r;
}

TEST(Recipe, StatisticsComeFromTheFittingRows) {
  const DatasetSplit parts = split(pima(), SplitFractions{}, 3);
  const auto [fitted, train] = fit_transform(pima_recipe(), parts.train);
  const Dataset test = fitted.apply(parts.test);

  // The test rows are transformed with train statistics, so they need not be centred.
  const DescriptiveStats train_stats = descriptive_stats(train);
  EXPECT_NEAR(*train_stats.at("Glucose").mean, 0.0, 1e-9);
  EXPECT_NEAR(*train_stats.at("Glucose").std, 1.0, 1e-9);
  EXPECT_GT(std::abs(*descriptive_stats(test).at("Glucose").mean), 1e-6);
  EXPECT_EQ(descriptive_stats(test).at("Insulin").missing_fraction, 0.0);
  EXPECT_TRUE(test.contains("kl1"));
  EXPECT_EQ(fitted.apply(parts.train), train);
}

TEST(Recipe, FittedJsonRoundTrip) {
  const auto [fitted, train] = fit_transform(pima_recipe(), pima());
  const FittedRecipe back = fitted_recipe_from_json(nlohmann::json::parse(to_json(fitted).dump()));
  EXPECT_EQ(back.apply(pima()), train);
  const std::vector<std::string> required = fitted.required_features();
  EXPECT_NE(std::find(required.begin(), required.end(), "Age"), required.end());
}

TEST(Recipe, FromJsonWithConstraintDocument) {
  const auto doc = constraints::parse("rule C1: Glucose > 0\nderive kl2: Age < 30 and Pregnancies <= 6");
  const nlohmann::json j = nlohmann::json::parse(R"({"steps": [
      {"op": "impute", "feature": "Glucose", "strategy": "mean"},
      {"op": "scale", "features": ["Age"], "method": "minmax"},
      {"op": "derive_from_constraints"}]})");
  const EngineeringRecipe r = recipe_from_json(j, &doc);
  ASSERT_EQ(r.steps.size(), 3u);
  const auto& derive = std::get<DeriveStep>(r.steps[2]);
  ASSERT_EQ(derive.doc.statements.size(), 1u);
  EXPECT_EQ(derive.doc.statements[0].name, "kl2");
  EXPECT_EQ(recipe_from_json(to_json(r)).steps.size(), 3u);
  EXPECT_THROW(recipe_from_json(nlohmann::json::parse(R"({"steps": [{"op": "derive_from_constraints"}]})")),
               ConfigError);
  EXPECT_THROW(recipe_from_json(nlohmann::json::parse(R"({"steps": [{"op": "pca"}]})")), ConfigError);
}

// ---------------------------------------------------------------- DPF

RelativeRecord diabetic(RelationClass rel, double adm) { return {rel, true, adm, std::nullopt}; }
RelativeRecord healthy(RelationClass rel, double acl) { return {rel, false, std::nullopt, acl}; }

TEST(Dpf, HandEvaluations) {
  EXPECT_NEAR(dpf({}), 0.4, 1e-9);
  const RelativeRecord parent = diabetic(RelationClass::parent_or_full_sibling, 40);
  EXPECT_NEAR(dpf(std::span(&parent, 1)), 0.88, 1e-9);
  const RelativeRecord other = healthy(RelationClass::parent_or_full_sibling, 64);
  EXPECT_NEAR(dpf(std::span(&other, 1)), 20.0 / 75.0, 1e-9);
  EXPECT_NEAR(dpf(std::span(&other, 1)), 0.2667, 5e-5);
}

TEST(Dpf, GeneShares) {
  EXPECT_EQ(gene_share(RelationClass::parent_or_full_sibling), 0.5);
  EXPECT_EQ(gene_share(RelationClass::half_sibling_grandparent_aunt_uncle), 0.25);
  EXPECT_EQ(gene_share(RelationClass::half_aunt_half_uncle_cousin), 0.125);
  const std::vector<RelativeRecord> family{diabetic(RelationClass::half_aunt_half_uncle_cousin, 48),
                                           healthy(RelationClass::half_sibling_grandparent_aunt_uncle, 54)};
  EXPECT_NEAR(dpf(family), (0.125 * 40 + 20) / (0.25 * 40 + 50), 1e-12);
}

TEST(Dpf, RejectsMalformedRecords) {
  const std::vector<std::vector<RelativeRecord>> bad{
      {{RelationClass::parent_or_full_sibling, true, std::nullopt, 40.0}},
      {{RelationClass::parent_or_full_sibling, false, 40.0, std::nullopt}},
      {diabetic(RelationClass::parent_or_full_sibling, 0.0)},
      {healthy(RelationClass::parent_or_full_sibling, 122.0)},
  };
  for (const auto& records : bad) EXPECT_THROW(dpf(records), std::invalid_argument);
}

TEST(Dpf, MonotoneInDiabeticRelativesAndDiagnosisAge) {
  Rng rng(31);
  const RelationClass classes[] = {RelationClass::parent_or_full_sibling,
                                   RelationClass::half_sibling_grandparent_aunt_uncle,
                                   RelationClass::half_aunt_half_uncle_cousin};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RelativeRecord> family;
    const std::size_t n = rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      const RelationClass rel = classes[rng.below(3)];
      const double age = 1.0 + 120.0 * rng.uniform();
      family.push_back(rng.below(2) ? diabetic(rel, age) : healthy(rel, age));
    }
    const double base = dpf(family);
    const double adm = 1.0 + 86.0 * rng.uniform();
    family.push_back(diabetic(classes[rng.below(3)], adm));
    const double added = dpf(family);
    EXPECT_GE(added, base);
    family.back().adm_years = adm + (87.9 - adm) * rng.uniform();
    EXPECT_LE(dpf(family), added);
  }
}

}  // namespace
}  // namespace cmml::engineering
