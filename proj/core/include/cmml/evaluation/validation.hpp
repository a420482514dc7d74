#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmml/engineering.hpp"
#include "cmml/evaluation/metrics.hpp"
#include "cmml/learners/model.hpp"
#include "cmml/tabular.hpp"

namespace cmml {

// Where engineering statistics are estimated during resampling. per_fold fits
// them on the training rows of each fold; global fits once on all rows and
// leaks held-out statistics into training.
enum class RecipeFit { per_fold, global };

std::string_view to_string(RecipeFit mode);

struct ValidationOptions {
  std::string target;
  Task task = Task::classification;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  RecipeFit recipe_fit = RecipeFit::per_fold;
};

struct MetricSummary {
  // Only metrics defined in at least one resample appear. std is the sample
  // standard deviation (0 for a single value).
  std::map<std::string, double> mean;
  std::map<std::string, double> std;
  std::map<std::string, std::size_t> defined;

  std::optional<double> mean_of(const std::string& metric) const;
  MetricSet means() const;
};

MetricSummary summarize(const std::vector<MetricSet>& sets);

// Seeded shuffle cut into k folds whose sizes differ by at most one; the
// first n mod k folds take the extra row. Rows within a fold are ascending.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed);

struct FoldResult {
  std::vector<std::size_t> test_rows;
  MetricSet metrics;
};

struct CvResult {
  std::vector<FoldResult> folds;
  MetricSummary summary;
};

// Trains `spec` on the engineered training rows and scores the held-out fold.
MetricSet evaluate_split(const Dataset& d, const ModelSpec& spec, const engineering::EngineeringRecipe& recipe,
                         std::span<const std::size_t> train_rows, std::span<const std::size_t> test_rows,
                         const ValidationOptions& options, std::uint64_t model_seed);

CvResult kfold_cv(const Dataset& d, const ModelSpec& spec, const engineering::EngineeringRecipe& recipe,
                  const ValidationOptions& options);

struct BootstrapResult {
  std::vector<MetricSet> iterations;
  MetricSummary summary;
  std::size_t skipped = 0;               // resamples with no out-of-bag rows
  std::vector<double> unique_fractions;  // distinct rows / n, per resample
};

BootstrapResult bootstrap_eval(const Dataset& d, const ModelSpec& spec, std::size_t iterations,
                               const ValidationOptions& options,
                               const engineering::EngineeringRecipe& recipe = {});

// Cartesian expansion over parameter axes; keys iterate in lexicographic
// order with the last key varying fastest.
struct ParamGrid {
  ModelFamily family = ModelFamily::logistic;
  std::map<std::string, std::vector<ParamValue>> axes;
};

std::vector<ModelSpec> expand(const ParamGrid& grid);

struct GridCell {
  ModelSpec spec;
  engineering::EngineeringRecipe recipe;
};

struct LeaderboardEntry {
  std::size_t grid_index = 0;
  ModelSpec spec;
  CvResult cv;
  std::optional<double> score;       // mean of the selection metric
  std::optional<std::string> error;  // training failure, if any
};

struct GridSearchResult {
  std::string metric;
  std::vector<LeaderboardEntry> leaderboard;  // best first

  const LeaderboardEntry& best() const;
};

// Every cell is scored on the same folds. Ordering: higher score, then fewer
// "rounds", then smaller "max_depth", then lower grid index; undefined scores last.
GridSearchResult grid_search(const Dataset& d, const std::vector<GridCell>& grid, const std::string& metric,
                             const ValidationOptions& options);

struct CurvePoint {
  ModelSpec spec;
  double train_loss = 0.0;
  double test_loss = 0.0;
};

// One seeded 70/30 split; loss is mean squared error for regression and the
// misclassification rate for classification. `ladder` is ordered by capacity.
std::vector<CurvePoint> fit_curve(const Dataset& d, const std::vector<ModelSpec>& ladder,
                                  const ValidationOptions& options,
                                  const engineering::EngineeringRecipe& recipe = {});

nlohmann::ordered_json to_json(const MetricSummary& s);

}  // namespace cmml
