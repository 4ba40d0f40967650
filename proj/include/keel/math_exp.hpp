#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace keel::math {

using BigInt = boost::multiprecision::cpp_int;

enum class SortKind { Bool, Int, Str, Entry, Unknown };

/// Mathematical sort. `element` names the entry type for Str and Entry sorts;
/// an empty element is a wildcard (e.g. the sort of `empty_string`).
struct Sort {
  SortKind kind = SortKind::Unknown;
  std::string element;

  static Sort boolean() { return {SortKind::Bool, {}}; }
  static Sort integer() { return {SortKind::Int, {}}; }
  static Sort string_of(std::string entry) { return {SortKind::Str, std::move(entry)}; }
  static Sort entry(std::string name) { return {SortKind::Entry, std::move(name)}; }
  static Sort unknown() { return {}; }

  bool is_bool() const { return kind == SortKind::Bool; }
  bool is_int() const { return kind == SortKind::Int; }
  bool is_str() const { return kind == SortKind::Str; }
  bool is_entry() const { return kind == SortKind::Entry; }

  std::string str() const;
  friend bool operator==(const Sort&, const Sort&) = default;
};

/// Sorts agree up to wildcards (Unknown, or an empty element name).
bool compatible(const Sort& a, const Sort& b);

enum class Op {
  True,
  False,
  And,
  Implies,
  Not,
  Eq,
  Neq,
  Le,
  Lt,
  Add,
  Sub,
  IntLit,
  MinInt,
  MaxInt,
  Concat,
  Reverse,
  Length,
  Singleton,
  Empty,
  Var,
  Apply,  // uninterpreted application; used by the prover's generic core
};

const char* op_name(Op op);

/// Identity of a variable occurrence: base name, prime level, and whether it
/// is the `#x` marker or a quantifier-bound variable.
struct VarKey {
  std::string name;
  int level = 0;
  bool incoming = false;
  bool bound = false;

  auto operator<=>(const VarKey&) const = default;
};

class MathExp;

namespace detail {
struct Node;
MathExp wrap(std::shared_ptr<const Node> node);
}  // namespace detail

/// Immutable mathematical expression. Copies share structure.
class MathExp {
 public:
  MathExp();  // `true`

  Op op() const;
  const Sort& sort() const;
  std::span<const MathExp> children() const;
  const MathExp& child(std::size_t i) const { return children()[i]; }
  std::size_t arity() const { return children().size(); }

  // Var / Apply only.
  const std::string& name() const;
  int level() const;
  bool incoming() const;
  bool bound() const;
  VarKey key() const;

  // IntLit only.
  const BigInt& value() const;

  bool is(Op o) const { return op() == o; }
  bool is_literal() const;  // relational or equational atom

  std::string render() const;
  std::size_t hash() const;

  friend bool operator==(const MathExp& a, const MathExp& b);
  friend bool operator<(const MathExp& a, const MathExp& b);

  static MathExp make(Op op, Sort sort, std::vector<MathExp> children);

 private:
  explicit MathExp(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;
  friend MathExp detail::wrap(std::shared_ptr<const detail::Node>);
};

/// Constructors. `concat` returns the canonical flattened form.
MathExp mk_true();
MathExp mk_false();
MathExp mk_bool(bool b);
MathExp mk_and(std::vector<MathExp> conjuncts);
MathExp mk_and(MathExp a, MathExp b);
MathExp mk_implies(MathExp a, MathExp b);
MathExp mk_not(MathExp a);
MathExp mk_eq(MathExp a, MathExp b);
MathExp mk_neq(MathExp a, MathExp b);
MathExp mk_le(MathExp a, MathExp b);
MathExp mk_lt(MathExp a, MathExp b);
MathExp mk_add(MathExp a, MathExp b);
MathExp mk_sub(MathExp a, MathExp b);
MathExp mk_int(BigInt v);
MathExp mk_min_int();
MathExp mk_max_int();
MathExp mk_concat(std::vector<MathExp> parts);
MathExp mk_concat(MathExp a, MathExp b);
MathExp mk_reverse(MathExp a);
MathExp mk_length(MathExp a);
MathExp mk_singleton(MathExp a);
MathExp mk_empty(std::string element = {});
MathExp mk_var(std::string name, Sort sort, int level = 0);
MathExp mk_incoming(std::string name, Sort sort);
MathExp mk_bound(std::string name, Sort sort);
MathExp mk_apply(std::string fn, Sort sort, std::vector<MathExp> args);

/// Replace the sort of a variable leaf (used by the checker when resolving names).
MathExp with_sort(const MathExp& var, Sort sort);

/// Display name of a variable at a level: Q, Q', Q''.
std::string primed(const std::string& name, int level);

struct SortMismatch : std::logic_error {
  using std::logic_error::logic_error;
};

using Bindings = std::map<VarKey, MathExp>;

/// Simultaneous substitution. Concatenations are re-canonicalized.
/// Throws SortMismatch if a binding's value has an incompatible sort.
MathExp substitute(const MathExp& exp, const Bindings& bindings);

/// Rebuild bottom-up so every concatenation is flattened and free of empties.
MathExp canonicalize(const MathExp& exp);

/// Top-level `and` chains, left to right.
std::vector<MathExp> split_conjuncts(const MathExp& exp);

/// Logical negation, pushed into relational literals where possible.
MathExp negate(const MathExp& exp);

/// Variables (non-bound) occurring in exp, in first-occurrence order.
std::vector<VarKey> free_vars(const MathExp& exp);

/// True if any `#x` marker occurs.
bool has_incoming(const MathExp& exp);
/// True if any bound variable occurs.
bool has_bound(const MathExp& exp);

struct MathExpHash {
  std::size_t operator()(const MathExp& e) const { return e.hash(); }
};

}  // namespace keel::math
