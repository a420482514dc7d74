#include "cmml/constraints/ast.hpp"

#include <algorithm>
#include <set>

namespace cmml::constraints {

std::string_view symbol(CmpOp op) {
  switch (op) {
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::eq: return "==";
    case CmpOp::ne: return "!=";
  }
  return "==";
}

bool compare(double lhs, CmpOp op, double rhs) {
  switch (op) {
    case CmpOp::gt: return lhs > rhs;
    case CmpOp::ge: return lhs >= rhs;
    case CmpOp::lt: return lhs < rhs;
    case CmpOp::le: return lhs <= rhs;
    case CmpOp::eq: return lhs == rhs;
    case CmpOp::ne: return lhs != rhs;
  }
  return false;
}

namespace {

bool same(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

void collect(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          for (const Operand* o : {&n.lhs, &n.rhs}) {
            if (auto* f = std::get_if<FeatureRef>(o)) out.insert(f->name);
          }
        } else if constexpr (std::is_same_v<T, MissingTest>) {
          out.insert(n.feature);
        } else if constexpr (std::is_same_v<T, Negation>) {
          collect(*n.operand, out);
        } else {
          collect(*n.lhs, out);
          collect(*n.rhs, out);
        }
      },
      e.node);
}

}  // namespace

bool Negation::operator==(const Negation& other) const { return same(operand, other.operand); }

bool Logical::operator==(const Logical& other) const {
  return op == other.op && same(lhs, other.lhs) && same(rhs, other.rhs);
}

bool Aggregate::operator==(const Aggregate& other) const {
  return kind == other.kind && feature == other.feature && same(predicate, other.predicate);
}

bool Statement::operator==(const Statement& other) const {
  if (kind != other.kind || name != other.name || body.index() != other.body.index()) return false;
  if (auto* e = std::get_if<ExprPtr>(&body)) return same(*e, std::get<ExprPtr>(other.body));
  return body == other.body;
}

ExprPtr make_expr(Comparison c) { return std::make_shared<const Expr>(Expr{std::move(c)}); }
ExprPtr make_expr(MissingTest m) { return std::make_shared<const Expr>(Expr{std::move(m)}); }
ExprPtr make_expr(Negation n) { return std::make_shared<const Expr>(Expr{std::move(n)}); }
ExprPtr make_expr(Logical l) { return std::make_shared<const Expr>(Expr{std::move(l)}); }

std::string_view to_string(AggregateKind kind) {
  switch (kind) {
    case AggregateKind::mean: return "mean";
    case AggregateKind::std: return "std";
    case AggregateKind::min: return "min";
    case AggregateKind::max: return "max";
    case AggregateKind::count: return "count";
    case AggregateKind::frac_missing: return "frac_missing";
    case AggregateKind::frac: return "frac";
  }
  return "mean";
}

std::optional<AggregateKind> aggregate_from_name(std::string_view name) {
  for (AggregateKind k : {AggregateKind::mean, AggregateKind::std, AggregateKind::min,
                          AggregateKind::max, AggregateKind::count, AggregateKind::frac_missing,
                          AggregateKind::frac}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(StatementKind kind) {
  switch (kind) {
    case StatementKind::range: return "range";
    case StatementKind::rule: return "rule";
    case StatementKind::invariant: return "invariant";
    case StatementKind::derive: return "derive";
  }
  return "rule";
}

const Statement* ConstraintDoc::find(std::string_view name) const {
  for (const auto& s : statements) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<std::string> referenced_features(const Expr& e) {
  std::set<std::string> out;
  collect(e, out);
  return {out.begin(), out.end()};
}

std::vector<std::string> referenced_features(const Statement& s) {
  switch (s.kind) {
    case StatementKind::range: return {s.name};
    case StatementKind::rule:
    case StatementKind::derive: return referenced_features(s.expr());
    case StatementKind::invariant: {
      const Aggregate& agg = s.aggregate().aggregate;
      if (agg.predicate) return referenced_features(*agg.predicate);
      return {agg.feature};
    }
  }
  return {};
}

}  // namespace cmml::constraints
