#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cmml::constraints {

enum class CmpOp { gt, ge, lt, le, eq, ne };

std::string_view symbol(CmpOp op);
bool compare(double lhs, CmpOp op, double rhs);

struct FeatureRef {
  std::string name;
  bool operator==(const FeatureRef&) const = default;
};

using Operand = std::variant<FeatureRef, double>;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Comparison {
  Operand lhs;
  CmpOp op = CmpOp::eq;
  Operand rhs;
  bool operator==(const Comparison&) const = default;
};

struct MissingTest {
  std::string feature;
  bool operator==(const MissingTest&) const = default;
};

struct Negation {
  ExprPtr operand;
  bool operator==(const Negation& other) const;
};

enum class Connective { conj, disj, implies };

struct Logical {
  Connective op = Connective::conj;
  ExprPtr lhs, rhs;
  bool operator==(const Logical& other) const;
};

struct Expr {
  std::variant<Comparison, MissingTest, Negation, Logical> node;
  bool operator==(const Expr&) const = default;
};

ExprPtr make_expr(Comparison c);
ExprPtr make_expr(MissingTest m);
ExprPtr make_expr(Negation n);
ExprPtr make_expr(Logical l);

enum class AggregateKind { mean, std, min, max, count, frac_missing, frac };

std::string_view to_string(AggregateKind kind);
std::optional<AggregateKind> aggregate_from_name(std::string_view name);

struct Aggregate {
  AggregateKind kind = AggregateKind::mean;
  std::string feature;  // empty for frac
  ExprPtr predicate;    // only for frac
  bool operator==(const Aggregate& other) const;
};

struct AggregateComparison {
  Aggregate aggregate;
  CmpOp op = CmpOp::eq;
  double threshold = 0.0;
  bool operator==(const AggregateComparison&) const = default;
};

struct Bound {
  CmpOp op = CmpOp::gt;
  double value = 0.0;
  bool operator==(const Bound&) const = default;
};

enum class StatementKind { range, rule, invariant, derive };

std::string_view to_string(StatementKind kind);

struct SourceLocation {
  std::size_t line = 1;
  std::size_t column = 1;
};

struct Statement {
  StatementKind kind = StatementKind::rule;
  // For ranges the name is also the constrained feature.
  std::string name;
  // range → bounds; rule/derive → expr; invariant → aggregate comparison.
  std::variant<std::vector<Bound>, ExprPtr, AggregateComparison> body;
  SourceLocation location;

  const std::vector<Bound>& bounds() const { return std::get<std::vector<Bound>>(body); }
  const Expr& expr() const { return *std::get<ExprPtr>(body); }
  const AggregateComparison& aggregate() const { return std::get<AggregateComparison>(body); }

  // Location is not part of the syntax tree identity.
  bool operator==(const Statement& other) const;
};

struct ConstraintDoc {
  std::vector<Statement> statements;
  std::string source_text;

  const Statement* find(std::string_view name) const;
  bool operator==(const ConstraintDoc& other) const { return statements == other.statements; }
};

// Sorted, de-duplicated names of every feature the statement mentions.
std::vector<std::string> referenced_features(const Statement& s);
std::vector<std::string> referenced_features(const Expr& e);

}  // namespace cmml::constraints
