#include "cmml/constraints/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cmml::constraints {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::vacuous: return "vacuous";
  }
  return "pass";
}

const StatementResult& ViolationReport::at(std::string_view name) const {
  for (const auto& r : results) {
    if (r.name == name) return r;
  }
  throw Error("no result for statement '" + std::string(name) + "'");
}

std::size_t ViolationReport::count(Status s) const {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [s](const auto& r) { return r.status == s; }));
}

namespace {

// Features whose absence makes the expression non-evaluable (missing(...)
// arguments are exempt).
void strict_features(const Expr& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          for (const Operand* o : {&n.lhs, &n.rhs}) {
            if (auto* f = std::get_if<FeatureRef>(o)) out.push_back(f->name);
          }
        } else if constexpr (std::is_same_v<T, Negation>) {
          strict_features(*n.operand, out);
        } else if constexpr (std::is_same_v<T, Logical>) {
          strict_features(*n.lhs, out);
          strict_features(*n.rhs, out);
        }
      },
      e.node);
}

double operand_value(const Operand& o, const Dataset& d, std::size_t row) {
  if (auto* f = std::get_if<FeatureRef>(&o)) return std::get<double>(d.column(f->name)[row]);
  return std::get<double>(o);
}

bool eval_present(const Expr& e, const Dataset& d, std::size_t row) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Comparison>) {
          return compare(operand_value(n.lhs, d, row), n.op, operand_value(n.rhs, d, row));
        } else if constexpr (std::is_same_v<T, MissingTest>) {
          return is_missing(d.column(n.feature)[row]);
        } else if constexpr (std::is_same_v<T, Negation>) {
          return !eval_present(*n.operand, d, row);
        } else {
          const bool lhs = eval_present(*n.lhs, d, row);
          switch (n.op) {
            case Connective::conj: return lhs && eval_present(*n.rhs, d, row);
            case Connective::disj: return lhs || eval_present(*n.rhs, d, row);
            case Connective::implies: return !lhs || eval_present(*n.rhs, d, row);
          }
          return false;
        }
      },
      e.node);
}

// Resolves every referenced feature, naming the statement on failure.
void check_references(const Statement& s, const Dataset& d) {
  for (const std::string& f : referenced_features(s)) {
    if (!d.contains(f)) {
      throw UnknownFeatureError(
          "statement '" + s.name + "' references unknown feature '" + f + "'", f);
    }
  }
  std::vector<std::string> numeric;
  switch (s.kind) {
    case StatementKind::range: numeric.push_back(s.name); break;
    case StatementKind::rule:
    case StatementKind::derive: strict_features(s.expr(), numeric); break;
    case StatementKind::invariant: {
      const Aggregate& agg = s.aggregate().aggregate;
      if (agg.predicate) {
        strict_features(*agg.predicate, numeric);
      } else if (agg.kind != AggregateKind::frac_missing && agg.kind != AggregateKind::count) {
        numeric.push_back(agg.feature);
      }
      break;
    }
  }
  for (const std::string& f : numeric) {
    if (d.feature(f).kind == FeatureKind::categorical) {
      throw ConstraintError("statement '" + s.name + "' compares categorical feature '" + f +
                            "' numerically");
    }
  }
}

bool row_has_missing(const std::vector<std::size_t>& cols, const Dataset& d, std::size_t row) {
  return std::any_of(cols.begin(), cols.end(),
                     [&](std::size_t c) { return is_missing(d.at(row, c)); });
}

std::vector<std::size_t> column_indices(const std::vector<std::string>& names, const Dataset& d) {
  std::vector<std::size_t> out;
  for (const auto& n : names) out.push_back(d.index_of(n));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void evaluate_range(const Statement& s, const Dataset& d, StatementResult& r) {
  const Column& col = d.column(s.name);
  for (std::size_t row = 0; row < d.n_rows(); ++row) {
    const double* v = number_if(col[row]);
    if (!v) {
      ++r.skipped_rows;
      continue;
    }
    ++r.evaluated_rows;
    const bool ok = std::all_of(s.bounds().begin(), s.bounds().end(),
                                [&](const Bound& b) { return compare(*v, b.op, b.value); });
    if (!ok) r.violating_rows.push_back(row);
  }
  r.status = r.violating_rows.empty() ? Status::pass : Status::fail;
}

void evaluate_rule(const Statement& s, const Dataset& d, StatementResult& r) {
  const Expr& body = s.expr();
  std::vector<std::string> strict;
  strict_features(body, strict);
  const auto cols = column_indices(strict, d);
  const Logical* top = std::get_if<Logical>(&body.node);
  const bool implication = top && top->op == Connective::implies;
  std::size_t antecedent = 0;
  for (std::size_t row = 0; row < d.n_rows(); ++row) {
    if (row_has_missing(cols, d, row)) {
      ++r.skipped_rows;
      continue;
    }
    ++r.evaluated_rows;
    if (implication) {
      if (!eval_present(*top->lhs, d, row)) continue;
      ++antecedent;
      if (!eval_present(*top->rhs, d, row)) r.violating_rows.push_back(row);
    } else if (!eval_present(body, d, row)) {
      r.violating_rows.push_back(row);
    }
  }
  if (implication) r.antecedent_matches = antecedent;
  if (!r.violating_rows.empty()) {
    r.status = Status::fail;
  } else if (implication && antecedent == 0) {
    r.status = Status::vacuous;
  } else {
    r.status = Status::pass;
  }
}

void evaluate_invariant(const Statement& s, const Dataset& d, StatementResult& r) {
  const AggregateComparison& ac = s.aggregate();
  const Aggregate& agg = ac.aggregate;
  std::optional<double> observed;
  if (agg.kind == AggregateKind::frac) {
    std::vector<std::string> strict;
    strict_features(*agg.predicate, strict);
    const auto cols = column_indices(strict, d);
    std::size_t hits = 0;
    for (std::size_t row = 0; row < d.n_rows(); ++row) {
      if (row_has_missing(cols, d, row)) {
        ++r.skipped_rows;
        continue;
      }
      ++r.evaluated_rows;
      if (eval_present(*agg.predicate, d, row)) ++hits;
    }
    if (r.evaluated_rows > 0) {
      observed = static_cast<double>(hits) / static_cast<double>(r.evaluated_rows);
    }
  } else {
    const Column& col = d.column(agg.feature);
    std::vector<double> values;
    for (const Cell& c : col) {
      if (is_missing(c)) {
        ++r.skipped_rows;
      } else if (const double* v = number_if(c)) {
        values.push_back(*v);
      }
    }
    r.evaluated_rows = d.n_rows() - r.skipped_rows;
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    switch (agg.kind) {
      case AggregateKind::mean:
        if (!values.empty()) observed = std::accumulate(values.begin(), values.end(), 0.0) / n;
        break;
      case AggregateKind::std:
        if (values.size() >= 2) observed = sample_std(values);
        break;
      case AggregateKind::min:
        if (!values.empty()) observed = values.front();
        break;
      case AggregateKind::max:
        if (!values.empty()) observed = values.back();
        break;
      case AggregateKind::count:
        observed = static_cast<double>(r.evaluated_rows);
        break;
      case AggregateKind::frac_missing:
        if (d.n_rows() > 0) {
          observed = static_cast<double>(r.skipped_rows) / static_cast<double>(d.n_rows());
        }
        break;
      case AggregateKind::frac:
        break;
    }
  }
  r.observed = observed;
  r.status = observed && compare(*observed, ac.op, ac.threshold) ? Status::pass : Status::fail;
}

Column derive_column(const Statement& s, const Dataset& d) {
  std::vector<std::string> strict;
  strict_features(s.expr(), strict);
  const auto cols = column_indices(strict, d);
  Column out;
  out.reserve(d.n_rows());
  for (std::size_t row = 0; row < d.n_rows(); ++row) {
    if (row_has_missing(cols, d, row)) {
      out.emplace_back(Missing{});
    } else {
      out.emplace_back(eval_present(s.expr(), d, row) ? 1.0 : 0.0);
    }
  }
  return out;
}

}  // namespace

std::optional<bool> evaluate_row(const Expr& e, const Dataset& d, std::size_t row) {
  std::vector<std::string> strict;
  strict_features(e, strict);
  for (const auto& f : strict) {
    if (is_missing(d.column(f)[row])) return std::nullopt;
  }
  return eval_present(e, d, row);
}

ViolationReport evaluate(const ConstraintDoc& doc, const Dataset& d) {
  for (const Statement& s : doc.statements) check_references(s, d);

  ViolationReport report;
  for (const Statement& s : doc.statements) {
    StatementResult r;
    r.name = s.name;
    r.kind = s.kind;
    r.features = referenced_features(s);
    switch (s.kind) {
      case StatementKind::range: evaluate_range(s, d, r); break;
      case StatementKind::rule: evaluate_rule(s, d, r); break;
      case StatementKind::invariant: evaluate_invariant(s, d, r); break;
      case StatementKind::derive: {
        // Informational: how many rows the derived feature marks.
        const Column col = derive_column(s, d);
        double ones = 0;
        for (const Cell& c : col) {
          if (is_missing(c)) {
            ++r.skipped_rows;
          } else {
            ++r.evaluated_rows;
            ones += std::get<double>(c);
          }
        }
        r.observed = ones;
        r.status = Status::pass;
        break;
      }
    }
    report.results.push_back(std::move(r));
  }
  return report;
}

Dataset derive_features(const ConstraintDoc& doc, const Dataset& d) {
  Dataset out = d;
  for (const Statement& s : doc.statements) {
    if (s.kind != StatementKind::derive) continue;
    if (out.contains(s.name)) {
      throw ConstraintError("derive statement '" + s.name + "' collides with an existing feature");
    }
    check_references(s, out);
    FeatureMeta meta;
    meta.name = s.name;
    meta.kind = FeatureKind::binary;
    meta.role = FeatureRole::derived;
    out = out.with_column(std::move(meta), derive_column(s, out));
  }
  return out;
}

}  // namespace cmml::constraints
