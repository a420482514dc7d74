#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmml/constraints/evaluator.hpp"
#include "cmml/constraints/parser.hpp"
#include "cmml/evaluation/design.hpp"
#include "cmml/evaluation/validation.hpp"
#include "cmml/learners/gbm.hpp"
#include "cmml/learners/tree.hpp"
#include "cmml/tabular.hpp"

namespace {

using namespace cmml;

const Dataset& pima() {
  static const Dataset d = load_csv(std::filesystem::path(CMML_DATA_DIR) / "diabetes.csv");
  return d;
}

const std::string& pima_constraints() {
  static const std::string text = [] {
    std::ifstream in(std::filesystem::path(CMML_CONFIG_DIR) / "pima.cmc");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }();
  return text;
}

struct Design {
  Matrix X;
  std::vector<double> y;
};

const Design& design() {
  static const Design d = [] {
    const auto features = model_features(pima(), "Outcome");
    return Design{feature_matrix(pima(), features), target_vector(pima(), "Outcome")};
  }();
  return d;
}

void BM_CartFit(benchmark::State& state) {
  const TreeParams params{static_cast<std::size_t>(state.range(0)), 1, Criterion::gini};
  for (auto _ : state) benchmark::DoNotOptimize(fit_cart(design().X, design().y, params));
}
BENCHMARK(BM_CartFit)->Arg(3)->Arg(5)->Arg(10);

void BM_BestSplit(benchmark::State& state) {
  std::vector<std::size_t> rows(design().X.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (auto _ : state) benchmark::DoNotOptimize(best_split(design().X, design().y, rows, Criterion::gini, 1));
}
BENCHMARK(BM_BestSplit);

void BM_GbmFit(benchmark::State& state) {
  GbmParams params;
  params.rounds = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_gbm(design().X, design().y, params));
}
BENCHMARK(BM_GbmFit)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_KfoldLogistic(benchmark::State& state) {
  const ValidationOptions options{"Outcome", Task::classification, 5, 1, RecipeFit::per_fold};
  const ModelSpec spec{ModelFamily::logistic, {}};
  for (auto _ : state) benchmark::DoNotOptimize(kfold_cv(pima(), spec, {}, options));
}
BENCHMARK(BM_KfoldLogistic)->Unit(benchmark::kMillisecond);

void BM_ParseConstraints(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(constraints::parse(pima_constraints()));
}
BENCHMARK(BM_ParseConstraints);

void BM_EvaluateConstraints(benchmark::State& state) {
  const auto doc = constraints::parse(pima_constraints());
  for (auto _ : state) benchmark::DoNotOptimize(constraints::evaluate(doc, pima()));
}
BENCHMARK(BM_EvaluateConstraints);

}  // namespace
BENCHMARK_MAIN();
