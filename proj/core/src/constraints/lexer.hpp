#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cmml::constraints::detail {

enum class TokenKind { identifier, number, colon, comma, lparen, rparen, op, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::string describe(const Token& t);

// Throws ParseError on characters outside the language.
std::vector<Token> tokenize(std::string_view text);

}  // namespace cmml::constraints::detail
