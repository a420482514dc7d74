#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmml/constraints/evaluator.hpp"
#include "cmml/constraints/scorecard.hpp"
#include "cmml/evaluation/gates.hpp"
#include "cmml/evaluation/validation.hpp"
#include "cmml/pipeline/config.hpp"
#include "cmml/pipeline/predictor.hpp"
#include "cmml/tabular.hpp"

namespace cmml::pipeline {

// The seven phases in execution order.
enum class Phase {
  problem_understanding,
  data_collection,
  data_engineering,
  model_training,
  model_optimization,
  model_integration,
  analytical_decision_making,
};

std::string_view to_string(Phase p);

struct PhaseEntry {
  Phase phase;
  std::string status;  // "completed" or "aborted"
  std::vector<std::string> notes;
};

struct ConstraintOutcome {
  std::string name;
  Severity severity = Severity::soft;
  constraints::Status status = constraints::Status::pass;
};

struct ChosenModel {
  std::string name;
  ModelSpec spec;
  std::optional<engineering::ScaleMethod> scale;
  MetricSummary cv;
  std::optional<MetricSummary> cv_global_recipe;  // same model, recipe fit once on all rows
  MetricSet holdout;                              // train+validation vs test split
  std::vector<std::string> features;
};

struct LeaderboardRow {
  std::string name;
  std::optional<engineering::ScaleMethod> scale;
  LeaderboardEntry entry;
};

struct RunReport {
  std::uint64_t seed = 0;
  std::string config_hash;
  RecipeFit recipe_fit = RecipeFit::per_fold;
  std::string generated_at;  // UTC, ISO 8601; the only nondeterministic field

  ProblemSection problem;
  std::vector<PhaseEntry> phases;

  std::string target;
  std::size_t rows = 0;
  std::size_t features = 0;
  std::vector<std::pair<std::string, double>> zero_fractions;
  DescriptiveStats raw_stats;
  DescriptiveStats marked_stats;

  std::optional<std::string> constraint_source;
  std::optional<constraints::ViolationReport> raw_violations;
  std::optional<constraints::ViolationReport> violations;  // after zero marking
  std::vector<ConstraintOutcome> constraint_outcomes;
  std::optional<constraints::QualityScorecard> scorecard;

  nlohmann::json recipe = nlohmann::json::object();
  std::vector<std::string> engineering_notes;

  std::string selection_metric;
  std::vector<LeaderboardRow> leaderboard;
  std::optional<ChosenModel> chosen;
  std::optional<GateReport> gates;

  bool aborted = false;
  std::optional<std::string> abort_reason;
  int exit_code = 0;  // 0 pass, 2 hard gate failed, 3 constraint abort
};

struct RunOptions {
  bool evaluate_gates = true;  // false stops after model integration
};

struct RunOutcome {
  RunReport report;
  std::optional<ModelBundle> model;
};

// Executes the phases in order; throws for operational errors (unreadable
// files, bad constraint documents). Writes nothing; see emit_report and save_bundle.
RunOutcome run(const PipelineConfig& config, std::uint64_t seed, const RunOptions& options = {});

}  // namespace cmml::pipeline
