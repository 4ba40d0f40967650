#pragma once

#include "keel/checker.hpp"
#include "keel/diagnostic.hpp"
#include "keel/math_exp.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace keel::theory {

/// A universally quantified library fact. Universals appear in the formulas
/// as bound variables. Each trigger is an alternative: a match of any one of
/// them binds every universal.
struct Theorem {
  std::string name;
  std::vector<math::MathExp> universals;
  std::optional<math::MathExp> hypothesis;  // conjunction of literals
  math::MathExp conclusion;                 // a single literal
  std::vector<math::MathExp> triggers;
  int line = 1;
};

std::string render(const Theorem& t);

/// Reads `Theorem NAME: For all u, v : Str, [if H then] C triggers p, q;`
/// stanzas. Each theorem is sort-checked and trigger-checked.
std::variant<std::vector<Theorem>, Diagnostics> parse_theory(std::string_view text);

/// Error message if some trigger fails to bind every universal.
std::optional<std::string> trigger_gap(const Theorem& t);

const std::vector<Theorem>& builtin_string_theory();
const std::vector<Theorem>& builtin_integer_facts();
/// String theory followed by integer facts.
std::vector<Theorem> builtin_theorems();

/// Loads every `*.thy` file in `dir` (sorted by name) after the built-ins.
std::variant<std::vector<Theorem>, Diagnostics> load_theories(const std::string& dir, bool with_builtins = true);

struct StandardComponent {
  std::string name;
  std::string source;
};

/// Source text of the shipped concepts, in dependency order.
const std::vector<StandardComponent>& standard_components();

/// Library holding the checked standard components. Built once.
const lang::Library& builtin_library();

}  // namespace keel::theory
