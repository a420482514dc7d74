// Command-line front end: run, check, stats, train, predict.
//
// Exit status: 0 success, 1 operational error, 2 hard performance gate
// failed, 3 constraint failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmml/constraints/evaluator.hpp"
#include "cmml/constraints/parser.hpp"
#include "cmml/error.hpp"
#include "cmml/pipeline/config.hpp"
#include "cmml/pipeline/predictor.hpp"
#include "cmml/pipeline/report.hpp"
#include "cmml/pipeline/runner.hpp"
#include "cmml/tabular.hpp"

namespace {

using namespace cmml;

constexpr int kOperationalError = 1;
constexpr int kConstraintFailure = 3;

std::optional<std::uint64_t> seed_option(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return pipeline::parse_seed(text);
}

int do_run(const std::string& config_path, const std::string& seed_text, const std::string& format,
           bool gates) {
  const pipeline::PipelineConfig config = pipeline::load_config(config_path);
  const std::uint64_t seed = pipeline::resolve_seed(seed_option(seed_text), config);
  pipeline::RunOptions options;
  options.evaluate_gates = gates;
  const pipeline::RunOutcome outcome = pipeline::run(config, seed, options);

  pipeline::emit_report(outcome.report, config.report.json, config.report.markdown);
  if (outcome.model && config.report.model) pipeline::save_bundle(*outcome.model, *config.report.model);

  const auto doc = pipeline::to_json(outcome.report);
  std::cout << (format == "markdown" ? pipeline::render_markdown(doc) : doc.dump(2) + "\n");
  if (config.report.json) std::cerr << "report: " << config.report.json->string() << '\n';
  if (config.report.markdown) std::cerr << "report: " << config.report.markdown->string() << '\n';
  if (outcome.model && config.report.model) std::cerr << "model: " << config.report.model->string() << '\n';
  return outcome.report.exit_code;
}

Dataset load_with_zeros(const std::string& data, const std::vector<std::string>& zeros) {
  Dataset d = load_csv(data);
  return zeros.empty() ? d : mark_missing_zeros(d, zeros);
}

int do_check(const std::string& data, const std::string& constraints_path,
             const std::vector<std::string>& zeros, const std::string& format) {
  const Dataset d = load_with_zeros(data, zeros);
  const auto doc = constraints::parse_file(constraints_path);
  const auto report = constraints::evaluate(doc, d);
  if (format == "markdown") {
    std::cout << pipeline::render_violations_markdown(report);
  } else {
    std::cout << pipeline::to_json(report).dump(2) << '\n';
  }
  return report.count(constraints::Status::fail) > 0 ? kConstraintFailure : 0;
}

int do_stats(const std::string& data, const std::vector<std::string>& zeros, const std::string& format) {
  const auto stats = descriptive_stats(load_with_zeros(data, zeros));
  if (format == "markdown") {
    std::cout << pipeline::render_stats_markdown(stats);
  } else {
    std::cout << pipeline::to_json(stats).dump(2) << '\n';
  }
  return 0;
}

int do_predict(const std::string& model, const std::string& input, const std::string& output) {
  pipeline::predict_csv(pipeline::load_bundle(model), input, output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conceptual-model-driven tabular ML pipeline"};
  app.require_subcommand(1);

  std::string format = "json";
  std::string config_path, seed_text, data_path, constraints_path, model_path, input_path, output_path;
  std::vector<std::string> zeros;

  auto* run = app.add_subcommand("run", "Execute every pipeline phase and write the report");
  run->add_option("--config", config_path, "Pipeline config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed_text, "Seed override (else config, else CMML_SEED)");
  run->add_option("--format", format, "Report format on stdout")->check(CLI::IsMember({"json", "markdown"}));

  auto* train = app.add_subcommand("train", "Run phases 1-6 and write the chosen model");
  train->add_option("--config", config_path, "Pipeline config JSON")->required()->check(CLI::ExistingFile);
  train->add_option("--seed", seed_text, "Seed override (else config, else CMML_SEED)");
  train->add_option("--format", format, "Report format on stdout")->check(CLI::IsMember({"json", "markdown"}));

  auto* check = app.add_subcommand("check", "Evaluate a constraint document against a CSV");
  check->add_option("--data", data_path, "Input CSV")->required()->check(CLI::ExistingFile);
  check->add_option("--constraints", constraints_path, "Constraint document (.cmc)")->required()->check(CLI::ExistingFile);
  check->add_option("--zero-as-missing", zeros, "Features whose zeros mean missing")->delimiter(',');
  check->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "markdown"}));

  auto* stats = app.add_subcommand("stats", "Descriptive statistics of a CSV");
  stats->add_option("--data", data_path, "Input CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--zero-as-missing", zeros, "Features whose zeros mean missing")->delimiter(',');
  stats->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "markdown"}));

  auto* predict = app.add_subcommand("predict", "Score a CSV with a saved model");
  predict->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  predict->add_option("--input", input_path, "Input CSV")->required()->check(CLI::ExistingFile);
  predict->add_option("--output", output_path, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(config_path, seed_text, format, true);
    if (*train) return do_run(config_path, seed_text, format, false);
    if (*check) return do_check(data_path, constraints_path, zeros, format);
    if (*stats) return do_stats(data_path, zeros, format);
    if (*predict) return do_predict(model_path, input_path, output_path);
  } catch (const std::exception& e) {
    std::cerr << "cmml: " << e.what() << '\n';
    return kOperationalError;
  }
  return kOperationalError;
}
