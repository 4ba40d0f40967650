#pragma once

#include "keel/math_exp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace keel::prover {

using TermId = std::uint32_t;

/// A hash-consed ground term. `args` are term ids as given at creation;
/// congruence works on their classes.
struct Term {
  math::Op op;
  std::string sym;  // variable key, function name, or literal value
  std::vector<TermId> args;
  math::Sort sort;
  math::MathExp exp;  // display form
  std::size_t weight = 1;  // node count of exp, saturating at EGraph::weight_cap
};

/// Term store with union-find and congruence closure. Classes are named by
/// their representative term; `members` lists every term of a class in
/// creation order.
class EGraph {
 public:
  static constexpr std::size_t weight_cap = 4096;

  /// Interns a ground expression (children first) and returns its term.
  TermId add(const math::MathExp& e);

  /// Interns an application over existing terms. A concatenation with fewer
  /// than two arguments is not a node; callers canonicalize first.
  TermId make(math::Op op, std::string sym, std::vector<TermId> args, math::Sort sort, math::MathExp display);

  /// The term with this signature modulo congruence, if interned.
  std::optional<TermId> lookup(math::Op op, const std::string& sym, const std::vector<TermId>& args) const;

  TermId find(TermId t) const;
  bool congruent(TermId a, TermId b) const { return find(a) == find(b); }

  /// Merges two classes and restores congruence. Returns false if they were
  /// already one class.
  bool merge(TermId a, TermId b);

  const Term& term(TermId t) const { return terms_[t]; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<TermId>& members(TermId t) const { return members_[find(t)]; }

  /// Class representatives in ascending id order.
  std::vector<TermId> classes() const;

  /// Bumped on every new term or merge.
  std::uint64_t version() const { return version_; }

  static std::string var_symbol(const math::MathExp& v);

 private:
  std::vector<Term> terms_;
  mutable std::vector<TermId> parent_;
  std::vector<std::vector<TermId>> members_;
  std::vector<std::vector<TermId>> uses_;  // terms having a member of this class as argument
  std::unordered_map<std::string, TermId> table_;
  std::uint64_t version_ = 0;

  std::string signature(math::Op op, const std::string& sym, const std::vector<TermId>& args) const;
};

}  // namespace keel::prover
