#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmml/constraints/ast.hpp"
#include "cmml/error.hpp"
#include "cmml/tabular.hpp"

namespace cmml::constraints {

class ConstraintError : public Error {
 public:
  using Error::Error;
};

enum class Status { pass, fail, vacuous };
std::string_view to_string(Status s);

struct StatementResult {
  std::string name;
  StatementKind kind = StatementKind::rule;
  Status status = Status::pass;
  std::vector<std::size_t> violating_rows;
  std::size_t skipped_rows = 0;    // rows with a missing referenced value
  std::size_t evaluated_rows = 0;  // rows that were checked
  // Rows where a top-level implication's antecedent held.
  std::optional<std::size_t> antecedent_matches;
  // Invariants: observed aggregate (nullopt when undefined). Derive: count of ones.
  std::optional<double> observed;
  std::vector<std::string> features;
};

struct ViolationReport {
  std::vector<StatementResult> results;

  const StatementResult& at(std::string_view name) const;
  std::size_t count(Status s) const;
};

// Row-level statements skip rows whose referenced values are missing (outside
// missing(...) tests). Throws UnknownFeatureError naming the statement and feature,
// or ConstraintError when a comparison touches a categorical feature.
ViolationReport evaluate(const ConstraintDoc& doc, const Dataset& d);

// Three-valued row evaluation: nullopt when a referenced value is missing.
std::optional<bool> evaluate_row(const Expr& e, const Dataset& d, std::size_t row);

// Appends one binary column (role derived) per derive statement, in document
// order: 1 where the body holds, 0 where it fails, MISSING where not evaluable.
Dataset derive_features(const ConstraintDoc& doc, const Dataset& d);

}  // namespace cmml::constraints
