#include "cmml/constraints/parser.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <set>

#include "lexer.hpp"

namespace cmml::constraints {

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) out += i + 1 == expected.size() ? " or " : ", ";
    out += expected[i];
  }
  return out;
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column,
                       std::vector<std::string> expected)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message +
            (expected.empty() ? std::string() : "; expected " + join_expected(expected))),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

using detail::Token;
using detail::TokenKind;

constexpr std::array<std::string_view, 9> kReserved = {
    "range", "rule", "invariant", "derive", "and", "or", "not", "implies", "missing"};

bool reserved(std::string_view word) {
  return std::find(kReserved.begin(), kReserved.end(), word) != kReserved.end();
}

const std::vector<std::string> kStatementStart = {"'range'", "'rule'", "'invariant'",
                                                  "'derive'"};
const std::vector<std::string> kUnaryStart = {"'not'", "'('", "'missing'", "identifier",
                                              "number"};
const std::vector<std::string> kCmpOps = {"'>'", "'>='", "'<'", "'<='", "'=='", "'!='"};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ConstraintDoc document() {
    ConstraintDoc doc;
    std::set<std::string> names;
    while (peek().kind != TokenKind::end) {
      const Token& start = peek();
      Statement s = statement();
      if (!names.insert(s.name).second) {
        throw ParseError("duplicate statement name '" + s.name + "'", start.line, start.column);
      }
      doc.statements.push_back(std::move(s));
    }
    return doc;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  bool at_keyword(std::string_view word) const {
    return peek().kind == TokenKind::identifier && peek().text == word;
  }

  [[noreturn]] void fail(const std::vector<std::string>& expected) const {
    const Token& t = peek();
    throw ParseError("unexpected " + detail::describe(t), t.line, t.column, expected);
  }

  const Token& expect(TokenKind kind, const std::string& label) {
    if (peek().kind != kind) fail({label});
    return take();
  }

  std::string identifier() {
    if (peek().kind != TokenKind::identifier || reserved(peek().text)) fail({"identifier"});
    return take().text;
  }

  CmpOp cmp_op() {
    if (peek().kind != TokenKind::op) fail(kCmpOps);
    const std::string& t = take().text;
    if (t == ">") return CmpOp::gt;
    if (t == ">=") return CmpOp::ge;
    if (t == "<") return CmpOp::lt;
    if (t == "<=") return CmpOp::le;
    if (t == "==") return CmpOp::eq;
    return CmpOp::ne;
  }

  double number() { return expect(TokenKind::number, "number").number; }

  Statement statement() {
    const Token& head = peek();
    Statement s;
    s.location = {head.line, head.column};
    if (at_keyword("range")) {
      s.kind = StatementKind::range;
    } else if (at_keyword("rule")) {
      s.kind = StatementKind::rule;
    } else if (at_keyword("invariant")) {
      s.kind = StatementKind::invariant;
    } else if (at_keyword("derive")) {
      s.kind = StatementKind::derive;
    } else {
      fail(kStatementStart);
    }
    take();
    s.name = identifier();
    expect(TokenKind::colon, "':'");
    switch (s.kind) {
      case StatementKind::range: {
        std::vector<Bound> bounds;
        do {
          Bound b;
          b.op = cmp_op();
          b.value = number();
          bounds.push_back(b);
        } while (peek().kind == TokenKind::comma && (take(), true));
        s.body = std::move(bounds);
        break;
      }
      case StatementKind::rule:
      case StatementKind::derive:
        s.body = expr();
        break;
      case StatementKind::invariant:
        s.body = aggregate_comparison();
        break;
    }
    return s;
  }

  AggregateComparison aggregate_comparison() {
    AggregateComparison ac;
    if (peek().kind != TokenKind::identifier || reserved(peek().text)) {
      fail({"aggregate ('mean', 'std', 'min', 'max', 'count', 'frac_missing', 'frac')"});
    }
    const Token& name = take();
    auto kind = aggregate_from_name(name.text);
    if (!kind) {
      throw ParseError("undeclared aggregate '" + name.text + "'", name.line, name.column,
                       {"'mean'", "'std'", "'min'", "'max'", "'count'", "'frac_missing'",
                        "'frac'"});
    }
    ac.aggregate.kind = *kind;
    expect(TokenKind::lparen, "'('");
    if (*kind == AggregateKind::frac) {
      ac.aggregate.predicate = expr();
    } else {
      ac.aggregate.feature = identifier();
    }
    expect(TokenKind::rparen, "')'");
    ac.op = cmp_op();
    ac.threshold = number();
    return ac;
  }

  ExprPtr expr() {
    ExprPtr lhs = or_term();
    if (at_keyword("implies")) {
      take();
      ExprPtr rhs = or_term();
      return make_expr(Logical{Connective::implies, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr or_term() {
    ExprPtr lhs = and_term();
    while (at_keyword("or")) {
      take();
      lhs = make_expr(Logical{Connective::disj, std::move(lhs), and_term()});
    }
    return lhs;
  }

  ExprPtr and_term() {
    ExprPtr lhs = unary();
    while (at_keyword("and")) {
      take();
      lhs = make_expr(Logical{Connective::conj, std::move(lhs), unary()});
    }
    return lhs;
  }

  ExprPtr unary() {
    if (at_keyword("not")) {
      take();
      return make_expr(Negation{unary()});
    }
    if (peek().kind == TokenKind::lparen) {
      take();
      ExprPtr inner = expr();
      expect(TokenKind::rparen, "')'");
      return inner;
    }
    if (at_keyword("missing")) {
      take();
      expect(TokenKind::lparen, "'('");
      MissingTest m{identifier()};
      expect(TokenKind::rparen, "')'");
      return make_expr(std::move(m));
    }
    if (peek().kind == TokenKind::number ||
        (peek().kind == TokenKind::identifier && !reserved(peek().text))) {
      Comparison c;
      c.lhs = operand();
      c.op = cmp_op();
      c.rhs = operand();
      return make_expr(std::move(c));
    }
    fail(kUnaryStart);
  }

  Operand operand() {
    if (peek().kind == TokenKind::number) return take().number;
    return FeatureRef{identifier()};
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

ConstraintDoc parse(std::string_view text) {
  Parser parser(detail::tokenize(text));
  ConstraintDoc doc = parser.document();
  doc.source_text = std::string(text);
  return doc;
}

ConstraintDoc parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open constraint file '" + path + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse(text);
}

}  // namespace cmml::constraints
