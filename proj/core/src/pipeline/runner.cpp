#include "cmml/pipeline/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numeric>

#include "cmml/constraints/parser.hpp"
#include "cmml/csv.hpp"
#include "cmml/error.hpp"
#include "cmml/evaluation/design.hpp"

namespace cmml::pipeline {

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::problem_understanding: return "problem_understanding";
    case Phase::data_collection: return "data_collection";
    case Phase::data_engineering: return "data_engineering";
    case Phase::model_training: return "model_training";
    case Phase::model_optimization: return "model_optimization";
    case Phase::model_integration: return "model_integration";
    case Phase::analytical_decision_making: return "analytical_decision_making";
  }
  return "problem_understanding";
}

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string percent(double fraction) { return csv::format_number(std::round(fraction * 10000.0) / 100.0) + "%"; }

Severity default_severity(constraints::StatementKind kind) {
  return kind == constraints::StatementKind::range ? Severity::hard : Severity::soft;
}

engineering::EngineeringRecipe with_scaling(engineering::EngineeringRecipe recipe,
                                            std::optional<engineering::ScaleMethod> scale) {
  if (scale) recipe.steps.emplace_back(engineering::ScaleStep{{}, *scale});
  return recipe;
}

}  // namespace

RunOutcome run(const PipelineConfig& config, std::uint64_t seed, const RunOptions& options) {
  RunOutcome outcome;
  RunReport& r = outcome.report;
  r.seed = seed;
  r.config_hash = config_hash(config);
  r.recipe_fit = config.validation.recipe_fit;
  r.generated_at = utc_now();
  r.selection_metric = config.validation.selection_metric;

  // 1. Problem understanding.
  r.problem = config.problem;
  r.phases.push_back({Phase::problem_understanding, "completed",
                      {"problem statement recorded: " + (config.problem.title.empty() ? "(untitled)" : config.problem.title)}});

  // 2. Data collection.
  Dataset raw = load_csv(config.data.csv);
  if (!raw.contains(config.data.target)) {
    throw ConfigError("target feature '" + config.data.target + "' is not a column of " + config.data.csv.string());
  }
  if (config.data.task == Task::classification && raw.feature(config.data.target).kind != FeatureKind::binary) {
    throw ConfigError("classification target '" + config.data.target + "' must be binary (0/1)");
  }
  raw = raw.with_role(config.data.target, FeatureRole::target);
  r.target = config.data.target;
  r.rows = raw.n_rows();
  r.features = raw.n_features();
  r.raw_stats = descriptive_stats(raw);
  for (const std::string& f : config.data.zero_as_missing) {
    const Column& col = raw.column(f);
    const auto zeros = std::count_if(col.begin(), col.end(), [](const Cell& c) {
      const double* v = number_if(c);
      return v && *v == 0.0;
    });
    r.zero_fractions.emplace_back(f, raw.n_rows() ? static_cast<double>(zeros) / static_cast<double>(raw.n_rows()) : 0.0);
  }
  const Dataset marked = mark_missing_zeros(raw, config.data.zero_as_missing);
  r.marked_stats = descriptive_stats(marked);
  {
    std::vector<std::string> notes{"loaded " + std::to_string(r.rows) + " rows and " + std::to_string(r.features) +
                                   " features from " + config.data.csv.filename().string()};
    for (const auto& [f, frac] : r.zero_fractions) notes.push_back(f + ": " + percent(frac) + " zeros treated as missing");
    r.phases.push_back({Phase::data_collection, "completed", std::move(notes)});
  }

  // 3. Data engineering.
  constraints::ConstraintDoc doc;
  std::vector<std::string> eng_notes;
  if (config.constraints.file) {
    doc = constraints::parse_file(*config.constraints.file);
    r.constraint_source = config.constraints.file->filename().string();
  }
  for (const auto& [name, sev] : config.constraints.severity) {
    if (!doc.find(name)) throw ConfigError("severity override names unknown statement '" + name + "'");
  }
  r.raw_violations = constraints::evaluate(doc, raw);
  r.violations = constraints::evaluate(doc, marked);
  std::vector<std::string> hard_failures;
  for (const auto& res : r.violations->results) {
    auto it = config.constraints.severity.find(res.name);
    const Severity sev = it != config.constraints.severity.end() ? it->second : default_severity(res.kind);
    r.constraint_outcomes.push_back({res.name, sev, res.status});
    if (res.status == constraints::Status::fail) {
      (sev == Severity::hard ? hard_failures : eng_notes)
          .push_back(res.name + " failed on " + std::to_string(res.violating_rows.size()) + " rows");
    }
  }
  r.scorecard = constraints::quality_scorecard(marked, *r.violations, config.declared_quality);

  engineering::EngineeringRecipe base;
  if (!config.data.zero_as_missing.empty()) {
    base.steps.emplace_back(engineering::MarkZerosStep{config.data.zero_as_missing});
  }
  for (auto& step : engineering::recipe_from_json(config.engineering, &doc).steps) base.steps.push_back(std::move(step));
  r.recipe = engineering::to_json(base);
  r.engineering_notes = config.engineering_notes;
  for (const ModelEntry& m : config.models) {
    eng_notes.push_back(m.name + ": " + (m.scale ? std::string(engineering::to_string(*m.scale)) + " scaling" : "unscaled inputs"));
  }

  if (!hard_failures.empty() && config.constraints.abort_on_hard_failure) {
    for (const auto& f : hard_failures) eng_notes.push_back("hard constraint " + f);
    r.phases.push_back({Phase::data_engineering, "aborted", std::move(eng_notes)});
    r.aborted = true;
    r.abort_reason = "hard constraint failures: " + join(hard_failures, "; ");
    r.exit_code = 3;
    return outcome;
  }
  for (const auto& f : hard_failures) eng_notes.push_back("hard constraint " + f + " (abort disabled)");
  {
    const Dataset engineered = engineering::fit_transform(base, raw).second;
    eng_notes.insert(eng_notes.begin(), "model inputs after engineering: " +
                                            join(model_features(engineered, config.data.target)));
  }
  r.phases.push_back({Phase::data_engineering, "completed", std::move(eng_notes)});

  // 4. Model training: every grid cell through k-fold CV on identical folds.
  std::vector<GridCell> cells;
  std::vector<const ModelEntry*> owner;
  for (const ModelEntry& m : config.models) {
    for (ModelSpec& spec : expand(m.grid)) {
      cells.push_back({std::move(spec), with_scaling(base, m.scale)});
      owner.push_back(&m);
    }
  }
  ValidationOptions vopt;
  vopt.target = config.data.target;
  vopt.task = config.data.task;
  vopt.k = config.validation.k;
  vopt.seed = seed;
  vopt.recipe_fit = config.validation.recipe_fit;
  const GridSearchResult search = grid_search(raw, cells, config.validation.selection_metric, vopt);
  std::size_t failed = 0;
  for (const LeaderboardEntry& e : search.leaderboard) {
    const ModelEntry& m = *owner[e.grid_index];
    r.leaderboard.push_back({m.name, m.scale, e});
    if (e.error) ++failed;
  }
  r.phases.push_back({Phase::model_training, "completed",
                      {std::to_string(cells.size()) + " grid cells evaluated with " + std::to_string(vopt.k) +
                           "-fold cross-validation (" + std::string(to_string(vopt.recipe_fit)) + " recipe fit)",
                       std::to_string(failed) + " cells failed to train"}});

  // 5. Model optimization: select the best cell.
  const LeaderboardEntry& best = search.best();
  if (!best.score) throw Error("no grid cell produced a defined " + config.validation.selection_metric);
  const ModelEntry& chosen_entry = *owner[best.grid_index];
  const engineering::EngineeringRecipe chosen_recipe = cells[best.grid_index].recipe;
  ChosenModel chosen;
  chosen.name = chosen_entry.name;
  chosen.spec = best.spec;
  chosen.scale = chosen_entry.scale;
  chosen.cv = best.cv.summary;
  if (vopt.recipe_fit == RecipeFit::per_fold) {
    ValidationOptions global = vopt;
    global.recipe_fit = RecipeFit::global;
    chosen.cv_global_recipe = kfold_cv(raw, best.spec, chosen_recipe, global).summary;
  }
  r.phases.push_back({Phase::model_optimization, "completed",
                      {"selected " + best.spec.label() + " with mean " + config.validation.selection_metric + " " +
                       csv::format_number(std::round(*best.score * 10000.0) / 10000.0)}});

  // 6. Model integration: refit on all rows and package with its preprocessing.
  auto [fitted, engineered] = engineering::fit_transform(chosen_recipe, raw);
  chosen.features = model_features(engineered, config.data.target);
  const Matrix X = feature_matrix(engineered, chosen.features);
  const std::vector<double> y = target_vector(engineered, config.data.target);
  ModelBundle bundle{fit(best.spec, X, y, config.data.task, seed), best.spec, config.data.task,
                     config.data.target, chosen.features, std::move(fitted)};
  {
    const DatasetSplit parts = split(raw, config.validation.split, seed);
    std::vector<std::size_t> train_rows = parts.train_rows;
    train_rows.insert(train_rows.end(), parts.validation_rows.begin(), parts.validation_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    chosen.holdout = evaluate_split(raw, best.spec, chosen_recipe, train_rows, parts.test_rows, vopt, seed);
  }
  r.phases.push_back({Phase::model_integration, "completed",
                      {"refit " + best.spec.label() + " on all " + std::to_string(r.rows) + " rows with " +
                       std::to_string(chosen.features.size()) + " inputs"}});
  r.chosen = std::move(chosen);
  outcome.model = std::move(bundle);

  // 7. Analytical decision making: gate the cross-validated metrics.
  if (options.evaluate_gates) {
    r.gates = gate_check(r.chosen->cv.means(), config.gates);
    std::vector<std::string> notes{r.gates->passed ? "all hard gates satisfied" : "hard gate violated"};
    for (const auto& g : r.gates->violations()) notes.push_back("violated: " + g.label());
    for (const auto& g : r.gates->warnings()) notes.push_back("warning: " + g.label());
    r.phases.push_back({Phase::analytical_decision_making, "completed", std::move(notes)});
    r.exit_code = r.gates->passed ? 0 : 2;
  }
  return outcome;
}

}  // namespace cmml::pipeline
