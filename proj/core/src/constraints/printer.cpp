#include <string>

#include "cmml/constraints/parser.hpp"
#include "cmml/csv.hpp"

namespace cmml::constraints {

namespace {

int precedence(Connective c) {
  switch (c) {
    case Connective::implies: return 1;
    case Connective::disj: return 2;
    case Connective::conj: return 3;
  }
  return 3;
}

std::string_view keyword(Connective c) {
  switch (c) {
    case Connective::implies: return "implies";
    case Connective::disj: return "or";
    case Connective::conj: return "and";
  }
  return "and";
}

std::string operand_text(const Operand& o) {
  if (auto* f = std::get_if<FeatureRef>(&o)) return f->name;
  return csv::format_number(std::get<double>(o));
}

const Logical* as_logical(const Expr& e) { return std::get_if<Logical>(&e.node); }

std::string wrap(const std::string& s) { return "(" + s + ")"; }

}  // namespace

std::string to_source(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          return operand_text(n.lhs) + " " + std::string(symbol(n.op)) + " " +
                 operand_text(n.rhs);
        } else if constexpr (std::is_same_v<T, MissingTest>) {
          return "missing(" + n.feature + ")";
        } else if constexpr (std::is_same_v<T, Negation>) {
          const std::string inner = to_source(*n.operand);
          return "not " + (as_logical(*n.operand) ? wrap(inner) : inner);
        } else {
          const int p = precedence(n.op);
          std::string lhs = to_source(*n.lhs);
          std::string rhs = to_source(*n.rhs);
          // Left-associative and/or: a same-level left child needs no parentheses.
          if (const Logical* l = as_logical(*n.lhs)) {
            const int lp = precedence(l->op);
            if (lp < p || (lp == p && n.op == Connective::implies)) lhs = wrap(lhs);
          }
          if (const Logical* r = as_logical(*n.rhs)) {
            if (precedence(r->op) <= p) rhs = wrap(rhs);
          }
          return lhs + " " + std::string(keyword(n.op)) + " " + rhs;
        }
      },
      e.node);
}

std::string to_source(const Statement& s) {
  std::string out = std::string(to_string(s.kind)) + " " + s.name + ": ";
  switch (s.kind) {
    case StatementKind::range: {
      const auto& bounds = s.bounds();
      for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (i) out += ", ";
        out += std::string(symbol(bounds[i].op)) + " " + csv::format_number(bounds[i].value);
      }
      break;
    }
    case StatementKind::rule:
    case StatementKind::derive:
      out += to_source(s.expr());
      break;
    case StatementKind::invariant: {
      const AggregateComparison& ac = s.aggregate();
      out += std::string(to_string(ac.aggregate.kind)) + "(";
      out += ac.aggregate.predicate ? to_source(*ac.aggregate.predicate) : ac.aggregate.feature;
      out += ") " + std::string(symbol(ac.op)) + " " + csv::format_number(ac.threshold);
      break;
    }
  }
  return out;
}

std::string to_source(const ConstraintDoc& doc) {
  std::string out;
  for (const auto& s : doc.statements) {
    out += to_source(s);
    out += '\n';
  }
  return out;
}

}  // namespace cmml::constraints
