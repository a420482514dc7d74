#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmml/constraints/ast.hpp"
#include "cmml/tabular.hpp"

namespace cmml::engineering {

enum class ImputeStrategy { mean, median, most_frequent, constant };
enum class ScaleMethod { minmax, zscore };

std::string_view to_string(ImputeStrategy s);
std::string_view to_string(ScaleMethod m);
ImputeStrategy parse_impute_strategy(std::string_view text);
ScaleMethod parse_scale_method(std::string_view text);

// Fill value computed over the non-missing cells of `feature`. Throws Error
// when the column is entirely missing and the strategy needs a statistic.
Cell fit_impute(const Dataset& d, const std::string& feature, ImputeStrategy strategy,
                const Cell& constant = Missing{});
Dataset apply_impute(const Dataset& d, const std::string& feature, const Cell& fill);
Dataset impute(const Dataset& d, const std::string& feature, ImputeStrategy strategy,
               const Cell& constant = Missing{});

struct ScaleParams {
  struct Entry {
    std::string feature;
    double offset = 0.0;  // min (minmax) or mean (zscore)
    double divisor = 1.0; // max - min (minmax) or sample std (zscore)
  };
  ScaleMethod method = ScaleMethod::zscore;
  std::vector<Entry> entries;

  double apply(std::string_view feature, double x) const;
};

// Features must be numeric with no missing cells. An empty feature list means
// every numeric input feature. Constant features are rejected.
ScaleParams fit_scale(const Dataset& d, std::span<const std::string> features, ScaleMethod method);
Dataset apply_scale(const Dataset& d, const ScaleParams& params);
std::pair<Dataset, ScaleParams> scale(const Dataset& d, std::span<const std::string> features,
                                      ScaleMethod method);

// Distinct category tokens in lexicographic order.
std::vector<std::string> one_hot_categories(const Dataset& d, const std::string& feature);
// Adds binary `feature=token` columns; unseen tokens encode as all zeros and a
// missing source makes every new cell missing. The source becomes excluded.
Dataset apply_one_hot(const Dataset& d, const std::string& feature,
                      std::span<const std::string> categories);
Dataset one_hot(const Dataset& d, const std::string& feature);

struct MarkZerosStep {
  std::vector<std::string> features;
};
struct ImputeStep {
  std::string feature;
  ImputeStrategy strategy = ImputeStrategy::mean;
  Cell constant = Missing{};
};
struct ScaleStep {
  std::vector<std::string> features;  // empty: all numeric inputs
  ScaleMethod method = ScaleMethod::zscore;
};
struct OneHotStep {
  std::string feature;
};
struct DeriveStep {
  constraints::ConstraintDoc doc;
};

using RecipeStep = std::variant<MarkZerosStep, ImputeStep, ScaleStep, OneHotStep, DeriveStep>;

struct EngineeringRecipe {
  std::vector<RecipeStep> steps;
};

struct FittedImpute {
  std::string feature;
  ImputeStrategy strategy = ImputeStrategy::mean;
  Cell fill = Missing{};
};
struct FittedOneHot {
  std::string feature;
  std::vector<std::string> categories;
};

using FittedStep = std::variant<MarkZerosStep, FittedImpute, ScaleParams, FittedOneHot, DeriveStep>;

// A recipe whose statistics were estimated on one dataset and can be replayed
// on any other with the same raw schema.
struct FittedRecipe {
  std::vector<FittedStep> steps;

  Dataset apply(const Dataset& d) const;
  // Raw feature names the recipe reads from its input, excluding names it creates.
  std::vector<std::string> required_features() const;
};

// Fits each step on the output of the previous one.
std::pair<FittedRecipe, Dataset> fit_transform(const EngineeringRecipe& recipe,
                                               const Dataset& train);

// Config form: {"steps": [{"op": "impute", "feature": ..., "strategy": ...}, ...]}.
// A derive step without inline "source" uses `constraints_doc`.
EngineeringRecipe recipe_from_json(const nlohmann::json& j,
                                   const constraints::ConstraintDoc* constraints_doc = nullptr);
nlohmann::json to_json(const EngineeringRecipe& recipe);
nlohmann::json to_json(const FittedRecipe& recipe);
FittedRecipe fitted_recipe_from_json(const nlohmann::json& j);

enum class RelationClass {
  parent_or_full_sibling,              // K = 0.5
  half_sibling_grandparent_aunt_uncle, // K = 0.25
  half_aunt_half_uncle_cousin,         // K = 0.125
};

double gene_share(RelationClass relation);

struct RelativeRecord {
  RelationClass relation = RelationClass::parent_or_full_sibling;
  bool diabetic = false;
  std::optional<double> adm_years;  // age at diagnosis, diabetic relatives
  std::optional<double> acl_years;  // age at last non-diabetic exam, others
};

/// Diabetes pedigree function:
///   (Σ_diabetic K(88 − ADM) + 20) / (Σ_non-diabetic K(ACL − 14) + 50)
/// Throws std::invalid_argument for records with the wrong age field or an age
/// outside (0, 122).
double dpf(std::span<const RelativeRecord> relatives);

}  // namespace cmml::engineering
