#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmml/engineering.hpp"
#include "cmml/learners/model.hpp"
#include "cmml/tabular.hpp"

namespace cmml::pipeline {

// A trained model with everything needed to score raw rows: the fitted
// preprocessing and the ordered model inputs it produces.
struct ModelBundle {
  TrainedModel model;
  ModelSpec spec;
  Task task = Task::classification;
  std::string target;
  std::vector<std::string> features;
  engineering::FittedRecipe recipe;

  // Raw input columns: those the recipe reads plus model inputs it does not create.
  std::vector<std::string> required_inputs() const;
};

nlohmann::ordered_json to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const nlohmann::json& j);
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

// Throws UnknownFeatureError naming the first required input the data lacks.
std::vector<Prediction> predict_rows(const ModelBundle& bundle, const Dataset& input);

// Writes the input columns unchanged followed by `prediction` and, for
// probabilistic models, `probability`. Row order is preserved.
void predict_csv(const ModelBundle& bundle, const std::filesystem::path& input,
                 const std::filesystem::path& output);

}  // namespace cmml::pipeline
