#pragma once

#include "keel/math_exp.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace keel::lang {

enum class ModuleKind { Concept, Enhancement, Realization, Facility };

const char* module_kind_name(ModuleKind k);

enum class Mode { Updates, Replaces, Restores, Preserves, Evaluates, Alters, Clears };

const char* mode_name(Mode m);
std::optional<Mode> mode_from(std::string_view word);

/// True for modes whose argument gets a fresh value at the call.
inline bool is_mutating(Mode m) {
  return m == Mode::Updates || m == Mode::Replaces || m == Mode::Alters || m == Mode::Clears;
}

/// An assertion clause as written (names not yet sort-resolved).
struct Clause {
  math::MathExp exp;
  int line = 1;
};

struct Formal {
  Mode mode = Mode::Updates;
  std::string name;
  std::string type;
  int line = 1;
};

struct OperationDecl {
  std::string name;
  std::vector<Formal> formals;
  std::optional<std::string> result_type;
  std::optional<Clause> requires_clause;
  std::optional<Clause> ensures_clause;
  int line = 1;
};

/// Executable expression. Arithmetic and relations only; no math notation.
struct ProgExp {
  enum class Kind { Var, IntLit, Call, Add, Sub, Rel };
  Kind kind = Kind::Var;
  std::string name;  // Var / Call
  math::BigInt value;
  math::Op rel = math::Op::Eq;  // Rel: Eq, Neq, Le, Lt (>, >= are swapped at parse)
  std::vector<ProgExp> args;
  int line = 1;
  int column = 1;
};

struct Stmt;

struct SwapStmt {
  std::string left, right;
};

struct AssignStmt {
  std::string target;
  ProgExp value;
};

struct CallStmt {
  ProgExp call;
};

struct IfStmt {
  ProgExp condition;
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
  bool has_else = false;
};

struct WhileStmt {
  ProgExp condition;
  std::optional<std::vector<std::string>> changing;
  int changing_line = 0;
  std::optional<Clause> maintaining;
  std::optional<Clause> decreasing;
  std::vector<Stmt> body;
};

struct Stmt {
  std::variant<SwapStmt, AssignStmt, CallStmt, IfStmt, WhileStmt> node;
  int line = 1;
  int end_line = 1;  // last line of compound statements
};

struct VarDecl {
  std::vector<std::string> names;
  std::string type;
  int line = 1;
};

struct ProcedureDecl {
  bool recursive = false;
  std::string name;
  std::vector<Formal> formals;
  std::optional<std::string> result_type;
  std::optional<Clause> decreasing;
  std::vector<VarDecl> vars;
  std::vector<Stmt> body;
  int line = 1;
  int end_line = 1;
  bool has_header = true;  // facility procedures inherit the operation header
};

struct TypeDecl {
  std::string name;
  math::Sort model;
  int line = 1;
};

struct ModuleParam {
  bool is_type = true;  // `type Entry` vs `Max_Depth: Integer`
  std::string name;
  std::string type;  // for constant parameters
};

struct SourceModule {
  ModuleKind kind = ModuleKind::Facility;
  std::string name;
  std::vector<ModuleParam> params;
  std::vector<std::string> uses;
  std::string concept_name;      // enhancement: `for X`; realization: `of X`
  std::string enhancement_name;  // realization: `for E`
  std::vector<TypeDecl> types;
  std::vector<Clause> constraints;
  std::vector<OperationDecl> operations;
  std::vector<ProcedureDecl> procedures;
  std::string source_text;
  int line = 1;
  int line_count = 1;
};

}  // namespace keel::lang
