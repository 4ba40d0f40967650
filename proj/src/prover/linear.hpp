#pragma once

#include "keel/egraph.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <map>
#include <vector>

namespace keel::prover {

using Rational = boost::multiprecision::cpp_rational;

/// Σ coef·atom + constant, atoms being integer class representatives.
struct Lin {
  std::map<TermId, Rational> coef;
  Rational constant = 0;

  void add(const Lin& other, const Rational& scale = 1);
  bool is_constant() const { return coef.empty(); }
};

/// Equations `row = 0` kept in reduced row echelon form, so `reduce` yields a
/// canonical representative of a form modulo the equations.
class LinearSystem {
 public:
  /// Returns false if the equation reduces to a nonzero constant.
  bool add_equation(Lin row);
  Lin reduce(Lin f) const;
  std::size_t rank() const { return rows_.size(); }

 private:
  std::vector<Lin> rows_;
  std::map<TermId, std::size_t> pivot_;
};

/// Looks for at most `depth` distinct facts (each meaning `f <= 0`, already
/// reduced) whose sum leaves `goal` minus that sum a constant <= 0. Every
/// chosen fact must cancel the first remaining atom, which keeps the search
/// narrow without losing combinations of unit coefficient.
bool entails_nonpositive(const Lin& goal, const std::vector<Lin>& facts, int depth,
                         const std::function<void()>& tick);

}  // namespace keel::prover
