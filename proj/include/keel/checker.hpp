#pragma once

#include "keel/ast.hpp"
#include "keel/diagnostic.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace keel::lang {

struct ResolvedFormal {
  Mode mode = Mode::Updates;
  std::string name;
  std::string type;
  math::Sort sort;
};

/// A sort-checked operation specification. Formals appear in `requires` and
/// `ensures` as level-0 variables; `#x` appears as an incoming marker.
struct Contract {
  std::string name;
  std::string owner;
  std::vector<ResolvedFormal> formals;
  std::optional<std::string> result_type;
  math::Sort result_sort;
  std::optional<math::MathExp> requires_clause;
  std::optional<math::MathExp> ensures_clause;
  int line = 1;
  int requires_line = 0;
  int ensures_line = 0;
};

using ContractRef = std::shared_ptr<const Contract>;

struct ProgramType {
  std::string name;
  math::Sort model;
  std::optional<math::MathExp> initial;  // none for generic entry types
};

/// A checked concept or enhancement.
struct SpecInfo {
  std::shared_ptr<const SourceModule> module;
  std::map<std::string, ProgramType> types;
  std::map<std::string, ContractRef> operations;
  std::vector<math::MathExp> constraints;
  std::map<std::string, math::Sort> constants;
};

/// Specifications that user modules are checked against: the standard
/// components plus any concepts/enhancements supplied alongside.
class Library {
 public:
  /// Checks and registers a concept or enhancement. Other kinds are ignored.
  Diagnostics add(SourceModule m);
  const SpecInfo* find(const std::string& name) const;
  std::vector<std::string> names() const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }

 private:
  std::map<std::string, SpecInfo> specs_;
  std::vector<std::string> order_;
};

struct LoopSpec {
  math::MathExp invariant;
  std::optional<math::MathExp> metric;
  std::vector<std::string> changing;
  int maintaining_line = 0;
  int decreasing_line = 0;
};

struct TypedProcedure {
  const ProcedureDecl* decl = nullptr;
  ContractRef contract;
  bool contract_is_local = true;  // contract clauses live in this module's text
  std::map<std::string, std::string> var_types;  // formals and locals
  std::vector<std::string> locals;
  std::optional<math::MathExp> decreasing;
  std::map<const ProgExp*, ContractRef> calls;  // Call nodes, and Add/Sub desugared to Sum/Difference
  std::map<const WhileStmt*, LoopSpec> loops;
};

struct TypedModule {
  std::shared_ptr<const SourceModule> module;
  std::map<std::string, ProgramType> types;
  std::map<std::string, ContractRef> contracts;
  std::vector<math::MathExp> constraints;
  std::map<std::string, math::Sort> constants;
  std::vector<TypedProcedure> procedures;
};

/// Resolves names and sorts of a user module against the library. Calls
/// resolve to specifications only, never to implementations.
std::variant<TypedModule, Diagnostics> check_module(SourceModule m, const Library& library);

/// Sorts of mathematical names visible in an assertion.
using SortEnv = std::map<std::string, math::Sort>;

/// Resolves variable sorts and checks well-sortedness. `formals` lists names
/// that may carry `#`; pass nullptr to forbid `#` entirely.
std::variant<math::MathExp, Diagnostic> resolve_sorts(const math::MathExp& e, const SortEnv& env,
                                                      const SortEnv* formals, int line);

}  // namespace keel::lang
