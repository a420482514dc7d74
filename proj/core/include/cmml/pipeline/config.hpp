#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmml/constraints/scorecard.hpp"
#include "cmml/engineering.hpp"
#include "cmml/evaluation/gates.hpp"
#include "cmml/evaluation/validation.hpp"
#include "cmml/learners/model.hpp"
#include "cmml/tabular.hpp"

namespace cmml::pipeline {

// Free-text problem framing, echoed into reports unchanged.
struct ProblemSection {
  std::string title;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();  // goals, actors, ...
};

struct DataSection {
  std::filesystem::path csv;  // resolved against the config directory
  std::string target;
  Task task = Task::classification;
  std::vector<std::string> zero_as_missing;
};

struct ConstraintSection {
  std::optional<std::filesystem::path> file;
  // Per-statement severity; unlisted ranges are hard, everything else soft.
  std::map<std::string, Severity> severity;
  bool abort_on_hard_failure = true;
};

struct ModelEntry {
  std::string name;
  ParamGrid grid;
  std::optional<engineering::ScaleMethod> scale;  // applied after the shared recipe
};

struct ValidationSection {
  std::size_t k = 5;
  SplitFractions split;
  std::optional<std::uint64_t> seed;
  std::string selection_metric = "accuracy";
  RecipeFit recipe_fit = RecipeFit::per_fold;
};

struct ReportSection {
  std::optional<std::filesystem::path> json;
  std::optional<std::filesystem::path> markdown;
  std::optional<std::filesystem::path> model;
};

struct PipelineConfig {
  ProblemSection problem;
  DataSection data;
  ConstraintSection constraints;
  constraints::DeclaredGrid declared_quality;
  nlohmann::json engineering = nlohmann::json::object();  // parsed once the constraints are loaded
  std::vector<std::string> engineering_notes;
  std::vector<ModelEntry> models;
  ValidationSection validation;
  std::vector<PerformanceGate> gates;
  ReportSection report;

  std::filesystem::path base_dir;
  nlohmann::json source;  // the document as read
};

// Throws ConfigError for structural problems, including an empty model list.
PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

// SHA-256 of the canonical (key-sorted, whitespace-free) document without its
// "report" section, as lowercase hex.
std::string config_hash(const PipelineConfig& config);
std::string sha256_hex(std::string_view bytes);

// Command line, then config, then the CMML_SEED environment variable.
// Throws ConfigError when none provides a seed.
std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, const PipelineConfig& config);
std::uint64_t parse_seed(std::string_view text);

}  // namespace cmml::pipeline
