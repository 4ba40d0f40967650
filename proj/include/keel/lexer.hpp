#pragma once

#include "keel/diagnostic.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace keel::lang {

enum class TokenKind {
  Keyword,
  Identifier,
  Integer,
  Operator,  // = /= <= < >= > + - := :=: o
  Bar,
  Semicolon,
  Comma,
  Colon,
  LParen,
  RParen,
  Hash,
  End,
};

const char* token_kind_name(TokenKind k);

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  int line = 1;
  int column = 1;

  bool is(TokenKind k) const { return kind == k; }
  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
  bool is_op(std::string_view t) const { return is(TokenKind::Operator, t); }
};

bool is_keyword(std::string_view word);

/// Splits source text into tokens. Whitespace and comments (`-- ...` to end of
/// line, `(* ... *)` blocks) are dropped. The End token is not included.
std::variant<std::vector<Token>, Diagnostics> tokenize(std::string_view source);

}  // namespace keel::lang
