#pragma once

#include "keel/ast.hpp"
#include "keel/diagnostic.hpp"
#include "keel/lexer.hpp"

#include <string_view>
#include <variant>
#include <vector>

namespace keel::lang {

/// Recursive-descent parser over a token list. Stops at the first error by
/// throwing FrontEndError.
class Parser {
 public:
  explicit Parser(std::vector<Token> tokens);

  SourceModule module();
  math::MathExp assertion();
  ProgExp program_condition();

  // Token cursor, shared with the theory-file reader.
  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool at_end() const { return peek().is(TokenKind::End); }
  bool accept(TokenKind kind, std::string_view text = {});
  bool accept_keyword(std::string_view kw) { return accept(TokenKind::Keyword, kw); }
  Token expect(TokenKind kind, std::string_view text, std::string_view what);
  Token expect_keyword(std::string_view kw) { return expect(TokenKind::Keyword, kw, kw); }
  std::string identifier(std::string_view what);
  [[noreturn]] void fail(const Token& at, std::string message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;

  void module_params(SourceModule& m);
  void uses_clause(SourceModule& m);
  void end_of(const std::string& name);
  void concept_body(SourceModule& m);
  OperationDecl operation_header();
  void operation_clauses(OperationDecl& op);
  std::vector<Formal> formals();
  ProcedureDecl procedure_body(ProcedureDecl proc);
  ProcedureDecl procedure();
  std::vector<Stmt> statements();
  Stmt statement();
  math::Sort sort();

  math::MathExp implies_exp();
  math::MathExp and_exp();
  math::MathExp not_exp();
  math::MathExp rel_exp();
  math::MathExp add_exp();
  math::MathExp cat_exp();
  math::MathExp primary();

  ProgExp prog_add();
  ProgExp prog_primary();
  std::vector<ProgExp> prog_args();
  bool at_math_notation() const;
};

/// tokenize + Parser::module. `source` is retained in the result.
std::variant<SourceModule, Diagnostics> parse_module(std::string_view source);
std::variant<SourceModule, Diagnostics> parse_module(const std::vector<Token>& tokens,
                                                     std::string_view source);

/// Parses a standalone assertion such as `I = #J and J = #I`.
std::variant<math::MathExp, Diagnostics> parse_assertion(std::string_view text);

/// Renders a module back to source text. Parsing the result yields the same AST.
std::string print_module(const SourceModule& m);
std::string print_prog_exp(const ProgExp& e);

}  // namespace keel::lang
