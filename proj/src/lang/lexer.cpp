#include "keel/lexer.hpp"

#include <array>
#include <cctype>
#include <string>

namespace keel::lang {

namespace {

constexpr std::array kKeywords = {
    "Operation", "Procedure", "Recursive", "requires",   "ensures",  "maintaining",
    "decreasing", "changing", "While",     "do",         "If",       "then",
    "else",      "Var",       "updates",   "restores",   "replaces", "evaluates",
    "alters",    "clears",    "preserves", "end",        "Concept",  "Enhancement",
    "Realization", "Facility", "for",      "of",         "uses",     "Type",
    "is",        "modeled",   "by",        "constraint", "type",     "and",
    "not",       "implies",   "true",      "false",      "Reverse",  "min_int",
    "max_int",   "empty_string", "Theorem", "For",       "all",      "if",
    "triggers",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

const char* token_kind_name(TokenKind k) {
  switch (k) {
    case TokenKind::Keyword: return "kw";
    case TokenKind::Identifier: return "id";
    case TokenKind::Integer: return "int";
    case TokenKind::Operator: return "op";
    case TokenKind::Bar: return "bar";
    case TokenKind::Semicolon: return "semi";
    case TokenKind::Comma: return "comma";
    case TokenKind::Colon: return "colon";
    case TokenKind::LParen: return "lparen";
    case TokenKind::RParen: return "rparen";
    case TokenKind::Hash: return "hash";
    case TokenKind::End: return "end-of-input";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  for (const char* k : kKeywords)
    if (word == k) return true;
  return false;
}

std::variant<std::vector<Token>, Diagnostics> tokenize(std::string_view src) {
  std::vector<Token> out;
  Diagnostics diags;
  std::size_t i = 0;
  int line = 1;
  std::size_t line_start = 0;

  auto col = [&](std::size_t pos) { return static_cast<int>(pos - line_start) + 1; };
  auto push = [&](TokenKind k, std::string text, std::size_t pos) {
    out.push_back(Token{k, std::move(text), line, col(pos)});
  };
  auto newline = [&](std::size_t pos) {
    ++line;
    line_start = pos + 1;
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      newline(i);
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '(' && i + 1 < src.size() && src[i + 1] == '*') {
      int open_line = line;
      int open_col = col(i);
      i += 2;
      bool closed = false;
      while (i < src.size()) {
        if (src[i] == '*' && i + 1 < src.size() && src[i + 1] == ')') {
          i += 2;
          closed = true;
          break;
        }
        if (src[i] == '\n') newline(i);
        ++i;
      }
      if (!closed) diags.push_back({Severity::Error, "unterminated comment", open_line, open_col});
      continue;
    }
    if (ident_start(c)) {
      std::size_t start = i;
      while (i < src.size() && ident_char(src[i])) ++i;
      while (i < src.size() && src[i] == '\'') ++i;
      std::string word(src.substr(start, i - start));
      if (word == "o")
        push(TokenKind::Operator, word, start);
      else if (is_keyword(word))
        push(TokenKind::Keyword, word, start);
      else
        push(TokenKind::Identifier, word, start);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      push(TokenKind::Integer, std::string(src.substr(start, i - start)), start);
      continue;
    }
    auto two = src.substr(i, 2);
    if (src.substr(i, 3) == ":=:") {
      push(TokenKind::Operator, ":=:", i);
      i += 3;
      continue;
    }
    if (two == ":=" || two == "/=" || two == "<=" || two == ">=") {
      push(TokenKind::Operator, std::string(two), i);
      i += 2;
      continue;
    }
    switch (c) {
      case '=':
      case '<':
      case '>':
      case '+':
      case '-': push(TokenKind::Operator, std::string(1, c), i); break;
      case '|': push(TokenKind::Bar, "|", i); break;
      case ';': push(TokenKind::Semicolon, ";", i); break;
      case ',': push(TokenKind::Comma, ",", i); break;
      case ':': push(TokenKind::Colon, ":", i); break;
      case '(': push(TokenKind::LParen, "(", i); break;
      case ')': push(TokenKind::RParen, ")", i); break;
      case '#': push(TokenKind::Hash, "#", i); break;
      default: {
        std::string shown = std::isprint(static_cast<unsigned char>(c))
                                ? std::string("'") + c + "'"
                                : "byte 0x" + std::to_string(static_cast<unsigned char>(c));
        diags.push_back({Severity::Error, "unknown character " + shown, line, col(i)});
      }
    }
    ++i;
  }
  if (!diags.empty()) return diags;
  return out;
}

}  // namespace keel::lang
