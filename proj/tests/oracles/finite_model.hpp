#pragma once

#include "keel/math_exp.hpp"
#include "keel/theory.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

// Brute-force semantics of the string/integer fragment over a small universe.
// Arithmetic and string operations are exact; only the values assigned to
// variables are drawn from the bounded domains.
namespace keel::oracle {

struct ModelParams {
  long int_lo = -8;
  long int_hi = 8;
  long min_int = -8;
  long max_int = 7;
  int alphabet = 3;  // entries are 0 .. alphabet-1
  int max_len = 4;
};

struct Value {
  enum Kind { Bool, Int, Str, Entry } kind = Bool;
  long num = 0;  // Bool (0/1), Int, Entry
  std::vector<int> str;

  std::string show() const;
  friend bool operator==(const Value&, const Value&) = default;
};

using Env = std::map<math::VarKey, Value>;

Value eval(const math::MathExp& e, const Env& env, const ModelParams& p);
bool truth(const math::MathExp& e, const Env& env, const ModelParams& p);

std::vector<Value> domain(const math::Sort& s, const ModelParams& p);

struct Variable {
  math::VarKey key;
  math::Sort sort;
};

/// Shrinks string alphabet/length (never the integer window) until the full
/// product of variable domains fits `budget`. Candidates are tried largest
/// first; the last one (alphabet 1, length 1) always applies.
ModelParams fit_budget(const std::vector<Variable>& vars, const ModelParams& p, std::size_t budget);
std::size_t assignment_count(const std::vector<Variable>& vars, const ModelParams& p);

/// Calls `visit` for every assignment until it returns false. Returns the
/// number of assignments visited.
std::size_t for_each_assignment(const std::vector<Variable>& vars, const ModelParams& p,
                                const std::function<bool(const Env&)>& visit);

/// Free (non-bound) variables of the expressions with their sorts.
std::vector<Variable> variables_of(const std::vector<math::MathExp>& exps);

struct Check {
  bool valid = true;
  std::size_t assignments = 0;
  ModelParams params;
  std::string counterexample;  // "x = …, y = …" when invalid
};

/// Exhaustively checks givens ⊢ goal over the free variables.
Check check_entailment(const std::vector<math::MathExp>& givens, const math::MathExp& goal, const ModelParams& p,
                       std::size_t budget);

/// Exhaustively checks a theorem over its universals.
Check check_theorem(const theory::Theorem& t, const ModelParams& p, std::size_t budget);

}  // namespace keel::oracle
