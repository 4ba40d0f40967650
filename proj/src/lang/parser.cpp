#include "keel/parser.hpp"

#include <algorithm>

namespace keel::lang {

using math::MathExp;
using math::Op;

const char* module_kind_name(ModuleKind k) {
  switch (k) {
    case ModuleKind::Concept: return "concept";
    case ModuleKind::Enhancement: return "enhancement";
    case ModuleKind::Realization: return "realization";
    case ModuleKind::Facility: return "facility";
  }
  return "?";
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Updates: return "updates";
    case Mode::Replaces: return "replaces";
    case Mode::Restores: return "restores";
    case Mode::Preserves: return "preserves";
    case Mode::Evaluates: return "evaluates";
    case Mode::Alters: return "alters";
    case Mode::Clears: return "clears";
  }
  return "?";
}

std::optional<Mode> mode_from(std::string_view w) {
  static constexpr std::pair<std::string_view, Mode> table[] = {
      {"updates", Mode::Updates},     {"replaces", Mode::Replaces}, {"restores", Mode::Restores},
      {"preserves", Mode::Preserves}, {"evaluates", Mode::Evaluates}, {"alters", Mode::Alters},
      {"clears", Mode::Clears},
  };
  for (const auto& [name, mode] : table)
    if (name == w) return mode;
  return std::nullopt;
}

Parser::Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  int line = tokens_.empty() ? 1 : tokens_.back().line;
  int col = tokens_.empty() ? 1 : tokens_.back().column + static_cast<int>(tokens_.back().text.size());
  tokens_.push_back(Token{TokenKind::End, "", line, col});
}

const Token& Parser::peek(std::size_t ahead) const {
  return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

Token Parser::next() {
  Token t = peek();
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool Parser::accept(TokenKind kind, std::string_view text) {
  const auto& t = peek();
  if (t.kind != kind || (!text.empty() && t.text != text)) return false;
  next();
  return true;
}

void Parser::fail(const Token& at, std::string message) const {
  throw FrontEndError{{Diagnostic{Severity::Error, std::move(message), at.line, at.column}}};
}

namespace {
std::string describe(const Token& t) {
  if (t.is(TokenKind::End)) return "end of input";
  return "'" + t.text + "'";
}
}  // namespace

Token Parser::expect(TokenKind kind, std::string_view text, std::string_view what) {
  const auto& t = peek();
  if (t.kind != kind || (!text.empty() && t.text != text))
    fail(t, "expected " + std::string(what) + " but found " + describe(t));
  return next();
}

std::string Parser::identifier(std::string_view what) {
  const auto& t = peek();
  if (!t.is(TokenKind::Identifier)) fail(t, "expected " + std::string(what) + " but found " + describe(t));
  if (t.text.find('\'') != std::string::npos)
    fail(t, "prime characters are reserved for verification-condition display: " + t.text);
  return next().text;
}

// ---------------------------------------------------------------- modules

SourceModule Parser::module() {
  SourceModule m;
  const Token head = peek();
  m.line = head.line;
  if (accept_keyword("Concept")) {
    m.kind = ModuleKind::Concept;
    m.name = identifier("concept name");
    module_params(m);
    expect(TokenKind::Semicolon, "", "';'");
    uses_clause(m);
    concept_body(m);
  } else if (accept_keyword("Enhancement")) {
    m.kind = ModuleKind::Enhancement;
    m.name = identifier("enhancement name");
    expect_keyword("for");
    m.concept_name = identifier("concept name");
    expect(TokenKind::Semicolon, "", "';'");
    uses_clause(m);
    auto op = operation_header();
    operation_clauses(op);
    m.operations.push_back(std::move(op));
  } else if (accept_keyword("Realization")) {
    m.kind = ModuleKind::Realization;
    m.name = identifier("realization name");
    expect_keyword("for");
    m.enhancement_name = identifier("enhancement name");
    expect_keyword("of");
    m.concept_name = identifier("concept name");
    expect(TokenKind::Semicolon, "", "';'");
    uses_clause(m);
    m.procedures.push_back(procedure());
  } else if (accept_keyword("Facility")) {
    m.kind = ModuleKind::Facility;
    m.name = identifier("facility name");
    expect(TokenKind::Semicolon, "", "';'");
    uses_clause(m);
    while (peek().is_keyword("Operation")) {
      auto op = operation_header();
      operation_clauses(op);
      const Token proc_kw = expect_keyword("Procedure");
      ProcedureDecl proc;
      proc.name = op.name;
      proc.formals = op.formals;
      proc.result_type = op.result_type;
      proc.line = proc_kw.line;
      proc.has_header = false;
      m.operations.push_back(std::move(op));
      m.procedures.push_back(procedure_body(std::move(proc)));
    }
  } else {
    fail(head, "expected Concept, Enhancement, Realization or Facility but found " + describe(head));
  }
  end_of(m.name);
  if (!at_end()) fail(peek(), "unexpected " + describe(peek()) + " after end of module");
  return m;
}

void Parser::module_params(SourceModule& m) {
  if (!accept(TokenKind::LParen)) return;
  do {
    ModuleParam p;
    if (accept_keyword("type")) {
      p.is_type = true;
      p.name = identifier("type parameter");
    } else {
      p.is_type = false;
      p.name = identifier("parameter name");
      expect(TokenKind::Colon, "", "':'");
      p.type = identifier("parameter type");
    }
    m.params.push_back(std::move(p));
  } while (accept(TokenKind::Semicolon));
  expect(TokenKind::RParen, "", "')'");
}

void Parser::uses_clause(SourceModule& m) {
  while (accept_keyword("uses")) {
    do {
      m.uses.push_back(identifier("module name"));
    } while (accept(TokenKind::Comma));
    expect(TokenKind::Semicolon, "", "';'");
  }
}

void Parser::end_of(const std::string& name) {
  expect_keyword("end");
  const Token t = peek();
  auto closing = identifier("'" + name + "'");
  if (closing != name) fail(t, "'end " + closing + "' does not close '" + name + "'");
  expect(TokenKind::Semicolon, "", "';'");
}

void Parser::concept_body(SourceModule& m) {
  while (true) {
    const Token t = peek();
    if (accept_keyword("Type")) {
      TypeDecl td;
      td.line = t.line;
      td.name = identifier("type name");
      expect_keyword("is");
      expect_keyword("modeled");
      expect_keyword("by");
      td.model = sort();
      expect(TokenKind::Semicolon, "", "';'");
      m.types.push_back(std::move(td));
    } else if (accept_keyword("constraint")) {
      m.constraints.push_back(Clause{assertion(), t.line});
      expect(TokenKind::Semicolon, "", "';'");
    } else if (t.is_keyword("Operation")) {
      auto op = operation_header();
      operation_clauses(op);
      m.operations.push_back(std::move(op));
    } else {
      return;
    }
  }
}

math::Sort Parser::sort() {
  const Token t = peek();
  auto name = identifier("sort");
  if (name == "Z") return math::Sort::integer();
  if (name == "B") return math::Sort::boolean();
  if (name == "Str") {
    expect(TokenKind::LParen, "", "'('");
    auto elem = identifier("entry type");
    expect(TokenKind::RParen, "", "')'");
    return math::Sort::string_of(elem);
  }
  fail(t, "unknown sort '" + name + "' (expected Z, B or Str(T))");
}

std::vector<Formal> Parser::formals() {
  std::vector<Formal> out;
  expect(TokenKind::LParen, "", "'('");
  if (accept(TokenKind::RParen)) return out;
  do {
    const Token mt = peek();
    auto mode = mt.is(TokenKind::Keyword) ? mode_from(mt.text) : std::nullopt;
    if (!mode) fail(mt, "expected parameter mode but found " + describe(mt));
    next();
    std::vector<std::pair<std::string, int>> names;
    do {
      int line = peek().line;
      names.emplace_back(identifier("parameter name"), line);
    } while (accept(TokenKind::Comma));
    expect(TokenKind::Colon, "", "':'");
    auto type = identifier("parameter type");
    for (auto& [n, line] : names) out.push_back(Formal{*mode, n, type, line});
  } while (accept(TokenKind::Semicolon));
  expect(TokenKind::RParen, "", "')'");
  return out;
}

OperationDecl Parser::operation_header() {
  OperationDecl op;
  op.line = expect_keyword("Operation").line;
  op.name = identifier("operation name");
  op.formals = formals();
  if (accept(TokenKind::Colon)) op.result_type = identifier("result type");
  expect(TokenKind::Semicolon, "", "';'");
  return op;
}

void Parser::operation_clauses(OperationDecl& op) {
  const Token r = peek();
  if (accept_keyword("requires")) {
    op.requires_clause = Clause{assertion(), r.line};
    expect(TokenKind::Semicolon, "", "';'");
  }
  const Token e = peek();
  if (accept_keyword("ensures")) {
    op.ensures_clause = Clause{assertion(), e.line};
    expect(TokenKind::Semicolon, "", "';'");
  }
}

ProcedureDecl Parser::procedure() {
  ProcedureDecl proc;
  const Token first = peek();
  if (accept_keyword("Recursive")) proc.recursive = true;
  proc.line = expect_keyword("Procedure").line;
  if (proc.recursive) proc.line = first.line;
  proc.name = identifier("procedure name");
  proc.formals = formals();
  if (accept(TokenKind::Colon)) proc.result_type = identifier("result type");
  expect(TokenKind::Semicolon, "", "';'");
  return procedure_body(std::move(proc));
}

ProcedureDecl Parser::procedure_body(ProcedureDecl proc) {
  const Token d = peek();
  if (accept_keyword("decreasing")) {
    proc.decreasing = Clause{assertion(), d.line};
    expect(TokenKind::Semicolon, "", "';'");
  }
  while (peek().is_keyword("Var")) {
    VarDecl v;
    v.line = next().line;
    do {
      v.names.push_back(identifier("variable name"));
    } while (accept(TokenKind::Comma));
    expect(TokenKind::Colon, "", "':'");
    v.type = identifier("variable type");
    expect(TokenKind::Semicolon, "", "';'");
    proc.vars.push_back(std::move(v));
  }
  proc.body = statements();
  proc.end_line = peek().line;
  end_of(proc.name);
  return proc;
}

// ------------------------------------------------------------- statements

std::vector<Stmt> Parser::statements() {
  std::vector<Stmt> out;
  while (true) {
    const auto& t = peek();
    if (t.is_keyword("end") || t.is_keyword("else") || t.is(TokenKind::End)) return out;
    out.push_back(statement());
  }
}

Stmt Parser::statement() {
  const Token t = peek();
  Stmt s;
  s.line = t.line;
  if (accept_keyword("If")) {
    IfStmt st;
    st.condition = program_condition();
    expect_keyword("then");
    st.then_body = statements();
    if (accept_keyword("else")) {
      st.has_else = true;
      st.else_body = statements();
    }
    s.end_line = expect_keyword("end").line;
    expect(TokenKind::Semicolon, "", "';'");
    s.node = std::move(st);
    return s;
  }
  if (accept_keyword("While")) {
    WhileStmt st;
    st.condition = program_condition();
    while (true) {
      const Token c = peek();
      if (accept_keyword("changing")) {
        if (st.changing) fail(c, "duplicate changing clause");
        st.changing_line = c.line;
        std::vector<std::string> names;
        do {
          names.push_back(identifier("variable name"));
        } while (accept(TokenKind::Comma));
        st.changing = std::move(names);
      } else if (accept_keyword("maintaining")) {
        if (st.maintaining) fail(c, "duplicate maintaining clause");
        st.maintaining = Clause{assertion(), c.line};
      } else if (accept_keyword("decreasing")) {
        if (st.decreasing) fail(c, "duplicate decreasing clause");
        st.decreasing = Clause{assertion(), c.line};
      } else {
        break;
      }
      expect(TokenKind::Semicolon, "", "';'");
    }
    expect_keyword("do");
    st.body = statements();
    s.end_line = expect_keyword("end").line;
    expect(TokenKind::Semicolon, "", "';'");
    s.node = std::move(st);
    return s;
  }
  if (at_math_notation()) fail(t, "mathematical notation " + describe(t) + " is not allowed in executable code");
  auto name = identifier("statement");
  s.end_line = t.line;
  if (accept(TokenKind::Operator, ":=:")) {
    s.node = SwapStmt{name, identifier("variable name")};
  } else if (accept(TokenKind::Operator, ":=")) {
    s.node = AssignStmt{name, prog_add()};
  } else if (peek().is(TokenKind::LParen)) {
    ProgExp call;
    call.kind = ProgExp::Kind::Call;
    call.name = name;
    call.line = t.line;
    call.column = t.column;
    call.args = prog_args();
    s.node = CallStmt{std::move(call)};
  } else {
    fail(peek(), "expected ':=', ':=:' or '(' after '" + name + "' but found " + describe(peek()));
  }
  expect(TokenKind::Semicolon, "", "';'");
  return s;
}

// ------------------------------------------------------ program expressions

bool Parser::at_math_notation() const {
  const auto& t = peek();
  if (t.is(TokenKind::Bar) || t.is(TokenKind::Hash) || t.is_op("o") || t.is_op("<")) return true;
  return t.is(TokenKind::Keyword) &&
         (t.text == "Reverse" || t.text == "min_int" || t.text == "max_int" || t.text == "empty_string" ||
          t.text == "true" || t.text == "false");
}

ProgExp Parser::program_condition() {
  auto lhs = prog_add();
  const auto& t = peek();
  static constexpr std::string_view rels[] = {"=", "/=", "<=", "<", ">=", ">"};
  if (t.is(TokenKind::Operator) && std::find(std::begin(rels), std::end(rels), t.text) != std::end(rels)) {
    auto op = next();
    auto rhs = prog_add();
    ProgExp e;
    e.kind = ProgExp::Kind::Rel;
    e.line = op.line;
    e.column = op.column;
    if (op.text == "=") e.rel = Op::Eq;
    if (op.text == "/=") e.rel = Op::Neq;
    if (op.text == "<=" || op.text == ">=") e.rel = Op::Le;
    if (op.text == "<" || op.text == ">") e.rel = Op::Lt;
    if (op.text == ">=" || op.text == ">")
      e.args = {std::move(rhs), std::move(lhs)};
    else
      e.args = {std::move(lhs), std::move(rhs)};
    return e;
  }
  return lhs;
}

ProgExp Parser::prog_add() {
  auto lhs = prog_primary();
  while (peek().is_op("+") || peek().is_op("-")) {
    auto op = next();
    ProgExp e;
    e.kind = op.text == "+" ? ProgExp::Kind::Add : ProgExp::Kind::Sub;
    e.line = op.line;
    e.column = op.column;
    e.args = {std::move(lhs), prog_primary()};
    lhs = std::move(e);
  }
  return lhs;
}

std::vector<ProgExp> Parser::prog_args() {
  std::vector<ProgExp> args;
  expect(TokenKind::LParen, "", "'('");
  if (accept(TokenKind::RParen)) return args;
  do {
    args.push_back(prog_add());
  } while (accept(TokenKind::Comma));
  expect(TokenKind::RParen, "", "')'");
  return args;
}

ProgExp Parser::prog_primary() {
  const Token t = peek();
  ProgExp e;
  e.line = t.line;
  e.column = t.column;
  if (at_math_notation()) fail(t, "mathematical notation " + describe(t) + " is not allowed in executable code");
  if (t.is_op("-") && peek(1).is(TokenKind::Integer)) {
    next();
    e.kind = ProgExp::Kind::IntLit;
    e.value = -math::BigInt(next().text);
    return e;
  }
  if (t.is(TokenKind::Integer)) {
    next();
    e.kind = ProgExp::Kind::IntLit;
    e.value = math::BigInt(t.text);
    return e;
  }
  if (accept(TokenKind::LParen)) {
    auto inner = program_condition();
    expect(TokenKind::RParen, "", "')'");
    return inner;
  }
  e.name = identifier("expression");
  if (peek().is(TokenKind::LParen)) {
    e.kind = ProgExp::Kind::Call;
    e.args = prog_args();
  } else {
    e.kind = ProgExp::Kind::Var;
  }
  return e;
}

// ---------------------------------------------------------- assertions

MathExp Parser::assertion() { return implies_exp(); }

MathExp Parser::implies_exp() {
  auto lhs = and_exp();
  if (accept_keyword("implies")) return math::mk_implies(lhs, implies_exp());
  return lhs;
}

MathExp Parser::and_exp() {
  auto lhs = not_exp();
  while (accept_keyword("and")) lhs = math::mk_and(lhs, not_exp());
  return lhs;
}

MathExp Parser::not_exp() {
  if (accept_keyword("not")) return math::mk_not(not_exp());
  return rel_exp();
}

MathExp Parser::rel_exp() {
  auto lhs = add_exp();
  const auto& t = peek();
  if (!t.is(TokenKind::Operator)) return lhs;
  if (t.text == "=") return next(), math::mk_eq(lhs, add_exp());
  if (t.text == "/=") return next(), math::mk_neq(lhs, add_exp());
  if (t.text == "<=") return next(), math::mk_le(lhs, add_exp());
  if (t.text == "<") return next(), math::mk_lt(lhs, add_exp());
  if (t.text == ">=") return next(), math::mk_le(add_exp(), lhs);
  if (t.text == ">") return next(), math::mk_lt(add_exp(), lhs);
  return lhs;
}

MathExp Parser::add_exp() {
  auto lhs = cat_exp();
  while (true) {
    if (accept(TokenKind::Operator, "+"))
      lhs = math::mk_add(lhs, cat_exp());
    else if (accept(TokenKind::Operator, "-"))
      lhs = math::mk_sub(lhs, cat_exp());
    else
      return lhs;
  }
}

MathExp Parser::cat_exp() {
  std::vector<MathExp> parts{primary()};
  while (accept(TokenKind::Operator, "o")) parts.push_back(primary());
  if (parts.size() == 1) return parts.front();
  return math::mk_concat(std::move(parts));
}

MathExp Parser::primary() {
  const Token t = peek();
  if (t.is_op("-") && peek(1).is(TokenKind::Integer)) {
    next();
    return math::mk_int(-math::BigInt(next().text));
  }
  if (t.is(TokenKind::Integer)) return next(), math::mk_int(math::BigInt(t.text));
  if (accept_keyword("true")) return math::mk_true();
  if (accept_keyword("false")) return math::mk_false();
  if (accept_keyword("min_int")) return math::mk_min_int();
  if (accept_keyword("max_int")) return math::mk_max_int();
  if (accept_keyword("empty_string")) return math::mk_empty();
  if (accept(TokenKind::Hash)) return math::mk_incoming(identifier("parameter name after '#'"), math::Sort::unknown());
  if (accept_keyword("Reverse")) {
    expect(TokenKind::LParen, "", "'('");
    auto inner = implies_exp();
    expect(TokenKind::RParen, "", "')'");
    return math::mk_reverse(inner);
  }
  if (accept(TokenKind::LParen)) {
    auto inner = implies_exp();
    expect(TokenKind::RParen, "", "')'");
    return inner;
  }
  if (accept(TokenKind::Bar)) {
    auto inner = add_exp();
    expect(TokenKind::Bar, "", "closing '|'");
    return math::mk_length(inner);
  }
  if (accept(TokenKind::Operator, "<")) {
    auto inner = add_exp();
    expect(TokenKind::Operator, ">", "closing '>'");
    return math::mk_singleton(inner);
  }
  if (t.is(TokenKind::Identifier)) return math::mk_var(identifier("name"), math::Sort::unknown());
  fail(t, "expected an expression but found " + describe(t));
}

// ------------------------------------------------------------ entry points

std::variant<SourceModule, Diagnostics> parse_module(const std::vector<Token>& tokens,
                                                     std::string_view source) {
  try {
    Parser p(tokens);
    auto m = p.module();
    m.source_text = std::string(source);
    m.line_count = static_cast<int>(std::count(source.begin(), source.end(), '\n')) + 1;
    return m;
  } catch (FrontEndError& e) {
    return std::move(e.diagnostics);
  }
}

std::variant<SourceModule, Diagnostics> parse_module(std::string_view source) {
  auto toks = tokenize(source);
  if (auto* d = std::get_if<Diagnostics>(&toks)) return std::move(*d);
  return parse_module(std::get<std::vector<Token>>(toks), source);
}

std::variant<MathExp, Diagnostics> parse_assertion(std::string_view text) {
  auto toks = tokenize(text);
  if (auto* d = std::get_if<Diagnostics>(&toks)) return std::move(*d);
  try {
    Parser p(std::get<std::vector<Token>>(toks));
    auto e = p.assertion();
    if (!p.at_end()) p.fail(p.peek(), "unexpected '" + p.peek().text + "' after assertion");
    return e;
  } catch (FrontEndError& e) {
    return std::move(e.diagnostics);
  }
}

}  // namespace keel::lang
