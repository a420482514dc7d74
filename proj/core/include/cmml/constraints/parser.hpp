#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cmml/constraints/ast.hpp"
#include "cmml/error.hpp"

namespace cmml::constraints {

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column,
             std::vector<std::string> expected = {});

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

/// Parses constraint source text.
///
///   doc    := stmt*
///   stmt   := "range" ID ":" bound ("," bound)*
///           | "rule" ID ":" expr | "derive" ID ":" expr
///           | "invariant" ID ":" agg cmpop NUMBER
///   expr   := orterm ("implies" orterm)?
///   orterm := andterm ("or" andterm)*
///   andterm:= unary ("and" unary)*
///   unary  := "not" unary | "(" expr ")" | operand cmpop operand | "missing" "(" ID ")"
///   agg    := ("mean"|"std"|"min"|"max"|"count"|"frac_missing") "(" ID ")" | "frac" "(" expr ")"
///
/// `#` starts a comment that runs to end of line. Statement names must be
/// unique. Throws ParseError carrying line, column, and the expected tokens.
ConstraintDoc parse(std::string_view text);
ConstraintDoc parse_file(const std::string& path);

std::string to_source(const Expr& e);
std::string to_source(const Statement& s);
// One statement per line; parse(to_source(doc)) == doc.
std::string to_source(const ConstraintDoc& doc);

}  // namespace cmml::constraints
