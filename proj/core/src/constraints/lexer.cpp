#include "lexer.hpp"

#include <cctype>
#include <charconv>

#include "cmml/constraints/parser.hpp"

namespace cmml::constraints::detail {

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::end: return "end of input";
    case TokenKind::identifier: return "'" + t.text + "'";
    case TokenKind::number: return "number " + t.text;
    default: return "'" + t.text + "'";
  }
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1, col = 1, i = 0;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;

    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      tok.kind = TokenKind::identifier;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
      tokens.push_back(std::move(tok));
      continue;
    }

    const bool signed_number =
        c == '-' && i + 1 < text.size() && (digit(text[i + 1]) || text[i + 1] == '.');
    if (digit(c) || c == '.' || signed_number) {
      std::size_t j = i + (signed_number ? 1 : 0);
      while (j < text.size() && (digit(text[j]) || text[j] == '.')) ++j;
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && digit(text[k])) {
          while (k < text.size() && digit(text[k])) ++k;
          j = k;
        }
      }
      tok.kind = TokenKind::number;
      tok.text = std::string(text.substr(i, j - i));
      auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(),
                                       tok.number);
      if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size()) {
        throw ParseError("malformed number '" + tok.text + "'", line, col, {"number"});
      }
      advance(j - i);
      tokens.push_back(std::move(tok));
      continue;
    }

    auto single = [&](TokenKind kind) {
      tok.kind = kind;
      tok.text = std::string(1, c);
      advance(1);
      tokens.push_back(std::move(tok));
    };
    switch (c) {
      case ':': single(TokenKind::colon); continue;
      case ',': single(TokenKind::comma); continue;
      case '(': single(TokenKind::lparen); continue;
      case ')': single(TokenKind::rparen); continue;
      default: break;
    }

    const char next = i + 1 < text.size() ? text[i + 1] : '\0';
    if (c == '>' || c == '<') {
      tok.kind = TokenKind::op;
      tok.text = next == '=' ? std::string{c, '='} : std::string(1, c);
      advance(tok.text.size());
      tokens.push_back(std::move(tok));
      continue;
    }
    if ((c == '=' || c == '!') && next == '=') {
      tok.kind = TokenKind::op;
      tok.text = std::string{c, '='};
      advance(2);
      tokens.push_back(std::move(tok));
      continue;
    }
    if (c == '=' || c == '!') {
      throw ParseError(std::string("unexpected '") + c + "'", line, col,
                       {std::string("'") + c + "='"});
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }

  Token end;
  end.kind = TokenKind::end;
  end.line = line;
  end.column = col;
  tokens.push_back(end);
  return tokens;
}

}  // namespace cmml::constraints::detail
