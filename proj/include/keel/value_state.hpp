#pragma once

#include "keel/math_exp.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace keel::math {

/// Current prime level of every program variable along one execution path.
/// Level 0 of a formal is its incoming value (`#x`). Copied per path.
class ValueState {
 public:
  void declare(const std::string& name, Sort sort, int level = 0) {
    vars_[name] = Entry{std::move(sort), level};
  }

  bool contains(const std::string& name) const { return vars_.count(name) != 0; }

  int level(const std::string& name) const { return at(name).level; }
  const Sort& sort(const std::string& name) const { return at(name).sort; }

  /// The variable's current value.
  MathExp current(const std::string& name) const {
    const auto& e = at(name);
    return mk_var(name, e.sort, e.level);
  }

  /// The variable's entry value (level 0).
  MathExp entry(const std::string& name) const { return mk_var(name, at(name).sort, 0); }

  /// Move `name` to a fresh successor value and return it.
  MathExp advance(const std::string& name) {
    auto it = vars_.find(name);
    if (it == vars_.end()) throw std::out_of_range("undeclared variable " + name);
    ++it->second.level;
    return mk_var(name, it->second.sort, it->second.level);
  }

 private:
  struct Entry {
    Sort sort;
    int level = 0;
  };

  const Entry& at(const std::string& name) const {
    auto it = vars_.find(name);
    if (it == vars_.end()) throw std::out_of_range("undeclared variable " + name);
    return it->second;
  }

  std::map<std::string, Entry> vars_;
};

}  // namespace keel::math
