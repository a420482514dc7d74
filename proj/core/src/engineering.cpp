#include "cmml/engineering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "cmml/constraints/evaluator.hpp"
#include "cmml/constraints/parser.hpp"
#include "cmml/error.hpp"

namespace cmml::engineering {

std::string_view to_string(ImputeStrategy s) {
  switch (s) {
    case ImputeStrategy::mean: return "mean";
    case ImputeStrategy::median: return "median";
    case ImputeStrategy::most_frequent: return "most_frequent";
    case ImputeStrategy::constant: return "constant";
  }
  return "mean";
}

std::string_view to_string(ScaleMethod m) { return m == ScaleMethod::minmax ? "minmax" : "zscore"; }

ImputeStrategy parse_impute_strategy(std::string_view text) {
  if (text == "mean") return ImputeStrategy::mean;
  if (text == "median") return ImputeStrategy::median;
  if (text == "most_frequent") return ImputeStrategy::most_frequent;
  if (text == "constant") return ImputeStrategy::constant;
  throw std::invalid_argument("unknown imputation strategy '" + std::string(text) + "'");
}

ScaleMethod parse_scale_method(std::string_view text) {
  if (text == "minmax") return ScaleMethod::minmax;
  if (text == "zscore") return ScaleMethod::zscore;
  throw std::invalid_argument("unknown scaling method '" + std::string(text) + "'");
}

// ---------------------------------------------------------------- imputation

Cell fit_impute(const Dataset& d, const std::string& feature, ImputeStrategy strategy,
                const Cell& constant) {
  const FeatureMeta& meta = d.feature(feature);
  if (strategy == ImputeStrategy::constant) {
    if (is_missing(constant)) throw std::invalid_argument("constant imputation needs a value");
    if ((meta.kind == FeatureKind::categorical) != std::holds_alternative<std::string>(constant)) {
      throw std::invalid_argument("constant fill for '" + feature + "' has the wrong type");
    }
    return constant;
  }
  if ((strategy == ImputeStrategy::mean || strategy == ImputeStrategy::median) &&
      meta.kind == FeatureKind::categorical) {
    throw std::invalid_argument("cannot take the " + std::string(to_string(strategy)) +
                                " of categorical feature '" + feature + "'");
  }

  const Column& col = d.column(feature);
  if (std::all_of(col.begin(), col.end(), [](const Cell& c) { return is_missing(c); })) {
    throw Error("cannot impute '" + feature + "': every cell is missing");
  }

  if (strategy == ImputeStrategy::most_frequent) {
    // std::map ordering makes ties resolve to the smallest value or token.
    if (meta.kind == FeatureKind::categorical) {
      std::map<std::string, std::size_t> counts;
      for (const Cell& c : col) {
        if (auto* s = std::get_if<std::string>(&c)) ++counts[*s];
      }
      auto best = std::max_element(counts.begin(), counts.end(), [](auto& a, auto& b) {
        return a.second < b.second;
      });
      return best->first;
    }
    std::map<double, std::size_t> counts;
    for (const Cell& c : col) {
      if (auto* v = number_if(c)) ++counts[*v];
    }
    auto best = std::max_element(counts.begin(), counts.end(),
                                 [](auto& a, auto& b) { return a.second < b.second; });
    return best->first;
  }

  std::vector<double> values = d.present_values(feature);
  std::sort(values.begin(), values.end());
  if (strategy == ImputeStrategy::mean) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  return quantile_sorted(values, 0.5);
}

Dataset apply_impute(const Dataset& d, const std::string& feature, const Cell& fill) {
  FeatureMeta meta = d.feature(feature);
  Column col = d.column(feature);
  bool changed = false;
  for (Cell& c : col) {
    if (is_missing(c)) {
      c = fill;
      changed = true;
    }
  }
  if (!changed) return d;
  if (meta.kind == FeatureKind::binary) {
    const double* v = number_if(fill);
    if (v && *v != 0.0 && *v != 1.0) meta.kind = FeatureKind::numeric;
  }
  return d.with_replaced_column(feature, std::move(meta), std::move(col));
}

Dataset impute(const Dataset& d, const std::string& feature, ImputeStrategy strategy,
               const Cell& constant) {
  return apply_impute(d, feature, fit_impute(d, feature, strategy, constant));
}

// ------------------------------------------------------------------- scaling

double ScaleParams::apply(std::string_view feature, double x) const {
  for (const Entry& e : entries) {
    if (e.feature == feature) return (x - e.offset) / e.divisor;
  }
  throw UnknownFeatureError(std::string(feature));
}

namespace {

std::vector<std::string> default_scale_features(const Dataset& d) {
  std::vector<std::string> out;
  for (const auto& f : d.features()) {
    if (f.kind == FeatureKind::numeric && f.role == FeatureRole::input) out.push_back(f.name);
  }
  return out;
}

}  // namespace

ScaleParams fit_scale(const Dataset& d, std::span<const std::string> features, ScaleMethod method) {
  const std::vector<std::string> names =
      features.empty() ? default_scale_features(d)
                       : std::vector<std::string>(features.begin(), features.end());
  ScaleParams params;
  params.method = method;
  for (const std::string& name : names) {
    if (d.feature(name).kind == FeatureKind::categorical) {
      throw std::invalid_argument("cannot scale categorical feature '" + name + "'");
    }
    std::vector<double> values = d.present_values(name);
    if (values.size() != d.n_rows()) {
      throw Error("cannot scale '" + name + "': it has missing cells");
    }
    if (values.empty()) throw Error("cannot scale '" + name + "': no rows");
    std::sort(values.begin(), values.end());
    ScaleParams::Entry e;
    e.feature = name;
    if (method == ScaleMethod::minmax) {
      e.offset = values.front();
      e.divisor = values.back() - values.front();
      if (e.divisor == 0.0) throw Error("cannot min-max scale constant feature '" + name + "'");
    } else {
      e.offset =
          std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
      e.divisor = values.size() >= 2 ? sample_std(values) : 0.0;
      if (e.divisor == 0.0) throw Error("cannot standardise '" + name + "': std is 0");
    }
    params.entries.push_back(std::move(e));
  }
  return params;
}

Dataset apply_scale(const Dataset& d, const ScaleParams& params) {
  Dataset out = d;
  for (const auto& e : params.entries) {
    FeatureMeta meta = out.feature(e.feature);
    meta.kind = FeatureKind::numeric;
    Column col = out.column(e.feature);
    for (Cell& c : col) {
      if (const double* v = number_if(c)) c = (*v - e.offset) / e.divisor;
    }
    out = out.with_replaced_column(e.feature, std::move(meta), std::move(col));
  }
  return out;
}

std::pair<Dataset, ScaleParams> scale(const Dataset& d, std::span<const std::string> features,
                                      ScaleMethod method) {
  ScaleParams params = fit_scale(d, features, method);
  return {apply_scale(d, params), std::move(params)};
}

// ------------------------------------------------------------------- one-hot

std::vector<std::string> one_hot_categories(const Dataset& d, const std::string& feature) {
  if (d.feature(feature).kind != FeatureKind::categorical) {
    throw std::invalid_argument("one-hot encoding needs a categorical feature, '" + feature +
                                "' is " + std::string(to_string(d.feature(feature).kind)));
  }
  std::set<std::string> tokens;
  for (const Cell& c : d.column(feature)) {
    if (auto* s = std::get_if<std::string>(&c)) tokens.insert(*s);
  }
  return {tokens.begin(), tokens.end()};
}

Dataset apply_one_hot(const Dataset& d, const std::string& feature,
                      std::span<const std::string> categories) {
  const Column& source = d.column(feature);
  Dataset out = d.with_role(feature, FeatureRole::excluded);
  for (const std::string& token : categories) {
    FeatureMeta meta;
    meta.name = feature + "=" + token;
    meta.kind = FeatureKind::binary;
    meta.role = FeatureRole::input;
    Column col;
    col.reserve(source.size());
    for (const Cell& c : source) {
      if (is_missing(c)) {
        col.emplace_back(Missing{});
      } else {
        col.emplace_back(cell_text(c) == token ? 1.0 : 0.0);
      }
    }
    out = out.with_column(std::move(meta), std::move(col));
  }
  return out;
}

Dataset one_hot(const Dataset& d, const std::string& feature) {
  const auto categories = one_hot_categories(d, feature);
  return apply_one_hot(d, feature, categories);
}

// -------------------------------------------------------------------- recipe

Dataset FittedRecipe::apply(const Dataset& d) const {
  Dataset out = d;
  for (const FittedStep& step : steps) {
    out = std::visit(
        [&](const auto& s) -> Dataset {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, MarkZerosStep>) {
            return mark_missing_zeros(out, s.features);
          } else if constexpr (std::is_same_v<T, FittedImpute>) {
            return apply_impute(out, s.feature, s.fill);
          } else if constexpr (std::is_same_v<T, ScaleParams>) {
            return apply_scale(out, s);
          } else if constexpr (std::is_same_v<T, FittedOneHot>) {
            return apply_one_hot(out, s.feature, s.categories);
          } else {
            return constraints::derive_features(s.doc, out);
          }
        },
        step);
  }
  return out;
}

std::vector<std::string> FittedRecipe::required_features() const {
  std::vector<std::string> required;
  std::set<std::string> created;
  auto need = [&](const std::string& name) {
    if (!created.count(name) &&
        std::find(required.begin(), required.end(), name) == required.end()) {
      required.push_back(name);
    }
  };
  for (const FittedStep& step : steps) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, MarkZerosStep>) {
            for (const auto& f : s.features) need(f);
          } else if constexpr (std::is_same_v<T, FittedImpute>) {
            need(s.feature);
          } else if constexpr (std::is_same_v<T, ScaleParams>) {
            for (const auto& e : s.entries) need(e.feature);
          } else if constexpr (std::is_same_v<T, FittedOneHot>) {
            need(s.feature);
            for (const auto& c : s.categories) created.insert(s.feature + "=" + c);
          } else {
            for (const auto& st : s.doc.statements) {
              if (st.kind != constraints::StatementKind::derive) continue;
              for (const auto& f : constraints::referenced_features(st)) need(f);
              created.insert(st.name);
            }
          }
        },
        step);
  }
  return required;
}

std::pair<FittedRecipe, Dataset> fit_transform(const EngineeringRecipe& recipe,
                                               const Dataset& train) {
  FittedRecipe fitted;
  Dataset current = train;
  for (const RecipeStep& step : recipe.steps) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, MarkZerosStep>) {
            current = mark_missing_zeros(current, s.features);
            fitted.steps.emplace_back(s);
          } else if constexpr (std::is_same_v<T, ImputeStep>) {
            FittedImpute f{s.feature, s.strategy, fit_impute(current, s.feature, s.strategy, s.constant)};
            current = apply_impute(current, f.feature, f.fill);
            fitted.steps.emplace_back(std::move(f));
          } else if constexpr (std::is_same_v<T, ScaleStep>) {
            ScaleParams p = fit_scale(current, s.features, s.method);
            current = apply_scale(current, p);
            fitted.steps.emplace_back(std::move(p));
          } else if constexpr (std::is_same_v<T, OneHotStep>) {
            FittedOneHot f{s.feature, one_hot_categories(current, s.feature)};
            current = apply_one_hot(current, f.feature, f.categories);
            fitted.steps.emplace_back(std::move(f));
          } else {
            current = constraints::derive_features(s.doc, current);
            fitted.steps.emplace_back(s);
          }
        },
        step);
  }
  return {std::move(fitted), std::move(current)};
}

// ---------------------------------------------------------------------- json

namespace {

using nlohmann::json;

json cell_to_json(const Cell& c) {
  if (const double* v = number_if(c)) return *v;
  if (auto* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

Cell cell_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  return Missing{};
}

// Only derive statements matter to a recipe; keep them as source text.
constraints::ConstraintDoc derive_only(const constraints::ConstraintDoc& doc) {
  constraints::ConstraintDoc out;
  for (const auto& s : doc.statements) {
    if (s.kind == constraints::StatementKind::derive) out.statements.push_back(s);
  }
  out.source_text = constraints::to_source(out);
  return out;
}

}  // namespace

EngineeringRecipe recipe_from_json(const json& j, const constraints::ConstraintDoc* doc) {
  EngineeringRecipe recipe;
  const json& steps = j.is_array() ? j : j.value("steps", json::array());
  for (const json& s : steps) {
    const std::string op = s.at("op").get<std::string>();
    if (op == "mark_zeros") {
      recipe.steps.emplace_back(MarkZerosStep{s.at("features").get<std::vector<std::string>>()});
    } else if (op == "impute") {
      ImputeStep step;
      step.feature = s.at("feature").get<std::string>();
      step.strategy = parse_impute_strategy(s.at("strategy").get<std::string>());
      if (s.contains("value")) step.constant = cell_from_json(s.at("value"));
      recipe.steps.emplace_back(std::move(step));
    } else if (op == "scale") {
      ScaleStep step;
      if (s.contains("features")) step.features = s.at("features").get<std::vector<std::string>>();
      step.method = parse_scale_method(s.value("method", "zscore"));
      recipe.steps.emplace_back(std::move(step));
    } else if (op == "one_hot") {
      recipe.steps.emplace_back(OneHotStep{s.at("feature").get<std::string>()});
    } else if (op == "derive_from_constraints") {
      if (s.contains("source")) {
        recipe.steps.emplace_back(DeriveStep{derive_only(constraints::parse(s.at("source").get<std::string>()))});
      } else if (doc) {
        recipe.steps.emplace_back(DeriveStep{derive_only(*doc)});
      } else {
        throw ConfigError("derive_from_constraints step needs a constraints document");
      }
    } else {
      throw ConfigError("unknown engineering step '" + op + "'");
    }
  }
  return recipe;
}

json to_json(const EngineeringRecipe& recipe) {
  json steps = json::array();
  for (const RecipeStep& step : recipe.steps) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, MarkZerosStep>) {
            steps.push_back({{"op", "mark_zeros"}, {"features", s.features}});
          } else if constexpr (std::is_same_v<T, ImputeStep>) {
            json o = {{"op", "impute"}, {"feature", s.feature}, {"strategy", to_string(s.strategy)}};
            if (!is_missing(s.constant)) o["value"] = cell_to_json(s.constant);
            steps.push_back(std::move(o));
          } else if constexpr (std::is_same_v<T, ScaleStep>) {
            steps.push_back({{"op", "scale"}, {"features", s.features}, {"method", to_string(s.method)}});
          } else if constexpr (std::is_same_v<T, OneHotStep>) {
            steps.push_back({{"op", "one_hot"}, {"feature", s.feature}});
          } else {
            steps.push_back({{"op", "derive_from_constraints"}, {"source", constraints::to_source(s.doc)}});
          }
        },
        step);
  }
  return {{"steps", steps}};
}

json to_json(const FittedRecipe& recipe) {
  json steps = json::array();
  for (const FittedStep& step : recipe.steps) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, MarkZerosStep>) {
            steps.push_back({{"op", "mark_zeros"}, {"features", s.features}});
          } else if constexpr (std::is_same_v<T, FittedImpute>) {
            steps.push_back({{"op", "impute"},
                             {"feature", s.feature},
                             {"strategy", to_string(s.strategy)},
                             {"fill", cell_to_json(s.fill)}});
          } else if constexpr (std::is_same_v<T, ScaleParams>) {
            json entries = json::array();
            for (const auto& e : s.entries) {
              entries.push_back({{"feature", e.feature}, {"offset", e.offset}, {"divisor", e.divisor}});
            }
            steps.push_back({{"op", "scale"}, {"method", to_string(s.method)}, {"entries", entries}});
          } else if constexpr (std::is_same_v<T, FittedOneHot>) {
            steps.push_back({{"op", "one_hot"}, {"feature", s.feature}, {"categories", s.categories}});
          } else {
            steps.push_back({{"op", "derive_from_constraints"}, {"source", constraints::to_source(s.doc)}});
          }
        },
        step);
  }
  return steps;
}

FittedRecipe fitted_recipe_from_json(const json& j) {
  FittedRecipe recipe;
  for (const json& s : j) {
    const std::string op = s.at("op").get<std::string>();
    if (op == "mark_zeros") {
      recipe.steps.emplace_back(MarkZerosStep{s.at("features").get<std::vector<std::string>>()});
    } else if (op == "impute") {
      recipe.steps.emplace_back(FittedImpute{s.at("feature").get<std::string>(),
                                             parse_impute_strategy(s.at("strategy").get<std::string>()),
                                             cell_from_json(s.at("fill"))});
    } else if (op == "scale") {
      ScaleParams p;
      p.method = parse_scale_method(s.at("method").get<std::string>());
      for (const json& e : s.at("entries")) {
        p.entries.push_back({e.at("feature").get<std::string>(), e.at("offset").get<double>(),
                             e.at("divisor").get<double>()});
      }
      recipe.steps.emplace_back(std::move(p));
    } else if (op == "one_hot") {
      recipe.steps.emplace_back(FittedOneHot{s.at("feature").get<std::string>(),
                                             s.at("categories").get<std::vector<std::string>>()});
    } else if (op == "derive_from_constraints") {
      recipe.steps.emplace_back(DeriveStep{constraints::parse(s.at("source").get<std::string>())});
    } else {
      throw Error("unknown fitted engineering step '" + op + "'");
    }
  }
  return recipe;
}

// ----------------------------------------------------------------------- dpf

double gene_share(RelationClass relation) {
  switch (relation) {
    case RelationClass::parent_or_full_sibling: return 0.5;
    case RelationClass::half_sibling_grandparent_aunt_uncle: return 0.25;
    case RelationClass::half_aunt_half_uncle_cousin: return 0.125;
  }
  return 0.0;
}

double dpf(std::span<const RelativeRecord> relatives) {
  double affected = 0.0;
  double unaffected = 0.0;
  for (const RelativeRecord& r : relatives) {
    const std::optional<double>& age = r.diabetic ? r.adm_years : r.acl_years;
    const std::optional<double>& other = r.diabetic ? r.acl_years : r.adm_years;
    if (!age || other) {
      throw std::invalid_argument(r.diabetic
                                      ? "diabetic relative needs exactly an age at diagnosis"
                                      : "non-diabetic relative needs exactly an age at last exam");
    }
    if (!(*age > 0.0 && *age < 122.0)) {
      throw std::invalid_argument("relative age must lie in (0, 122)");
    }
    const double k = gene_share(r.relation);
    if (r.diabetic) {
      affected += k * (88.0 - *age);
    } else {
      unaffected += k * (*age - 14.0);
    }
  }
  return (affected + 20.0) / (unaffected + 50.0);
}

}  // namespace cmml::engineering
