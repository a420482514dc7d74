#include "cmml/pipeline/predictor.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cmml/csv.hpp"
#include "cmml/error.hpp"
#include "cmml/evaluation/design.hpp"

namespace cmml::pipeline {

using nlohmann::json;

std::vector<std::string> ModelBundle::required_inputs() const {
  std::vector<std::string> required = recipe.required_features();
  std::set<std::string> created;
  for (const auto& step : recipe.steps) {
    if (const auto* oh = std::get_if<engineering::FittedOneHot>(&step)) {
      for (const auto& c : oh->categories) created.insert(oh->feature + "=" + c);
    } else if (const auto* dv = std::get_if<engineering::DeriveStep>(&step)) {
      for (const auto& s : dv->doc.statements) created.insert(s.name);
    }
  }
  for (const std::string& f : features) {
    if (!created.count(f) && std::find(required.begin(), required.end(), f) == required.end()) {
      required.push_back(f);
    }
  }
  return required;
}

nlohmann::ordered_json to_json(const ModelBundle& bundle) {
  nlohmann::ordered_json j;
  j["format"] = "cmml.model_bundle";
  j["version"] = 1;
  j["task"] = bundle.task == Task::classification ? "classification" : "regression";
  j["target"] = bundle.target;
  j["features"] = bundle.features;
  j["spec"] = to_json(bundle.spec);
  j["preprocessing"] = engineering::to_json(bundle.recipe);
  j["model"] = to_json(bundle.model);
  return j;
}

ModelBundle bundle_from_json(const json& j) {
  try {
    if (j.value("format", "") != "cmml.model_bundle" || j.value("version", 0) != 1) {
      throw Error("not a version 1 model bundle");
    }
    ModelBundle b;
    b.task = j.at("task").get<std::string>() == "regression" ? Task::regression : Task::classification;
    b.target = j.at("target").get<std::string>();
    b.features = j.at("features").get<std::vector<std::string>>();
    b.spec = model_spec_from_json(j.at("spec"));
    b.recipe = engineering::fitted_recipe_from_json(j.at("preprocessing"));
    b.model = model_from_json(j.at("model"));
    if (n_features(b.model) > b.features.size()) throw Error("model expects more inputs than the bundle lists");
    return b;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model bundle: ") + e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file '" + path.string() + "'");
  out << to_json(bundle).dump(2) << '\n';
  if (!out) throw Error("failed writing model file '" + path.string() + "'");
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  try {
    return bundle_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error("model file '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::vector<Prediction> predict_rows(const ModelBundle& bundle, const Dataset& input) {
  for (const std::string& f : bundle.required_inputs()) {
    if (!input.contains(f)) throw UnknownFeatureError("input lacks required feature '" + f + "'", f);
  }
  const Dataset engineered = bundle.recipe.apply(input);
  const Matrix X = feature_matrix(engineered, bundle.features);
  std::vector<Prediction> out;
  out.reserve(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out.push_back(predict(bundle.model, X.row(i)));
  return out;
}

void predict_csv(const ModelBundle& bundle, const std::filesystem::path& input,
                 const std::filesystem::path& output) {
  const csv::Table table = csv::read_file(input);
  const Dataset data = load_csv(input);
  const std::vector<Prediction> predictions = predict_rows(bundle, data);
  const bool probabilistic =
      !predictions.empty() && std::all_of(predictions.begin(), predictions.end(),
                                          [](const Prediction& p) { return p.probability.has_value(); });

  std::ostringstream out;
  std::vector<std::string> header = table.header;
  header.push_back("prediction");
  if (probabilistic) header.push_back("probability");
  csv::write_row(out, header);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<std::string> row = table.rows[r];
    row.push_back(csv::format_number(predictions[r].label));
    if (probabilistic) row.push_back(csv::format_number(*predictions[r].probability));
    csv::write_row(out, row);
  }
  if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path());
  std::ofstream file(output, std::ios::binary);
  if (!file) throw Error("cannot write predictions to '" + output.string() + "'");
  file << out.str();
  if (!file) throw Error("failed writing predictions to '" + output.string() + "'");
}

}  // namespace cmml::pipeline
