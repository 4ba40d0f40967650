#include "finite_model.hpp"
#include "support.hpp"

#include "keel/math_exp.hpp"
#include "keel/parser.hpp"
#include "keel/theory.hpp"

#include "doctest.h"

using namespace keel;
using namespace keel::math;

namespace {

const Sort str = Sort::string_of("Entry");
const Sort ent = Sort::entry("Entry");

MathExp assertion(const std::string& text) {
  auto r = lang::parse_assertion(text);
  REQUIRE(std::holds_alternative<MathExp>(r));
  return std::get<MathExp>(r);
}

std::vector<theory::Theorem> theorems_from(const std::string& text) {
  auto r = theory::parse_theory(text);
  if (auto* d = std::get_if<Diagnostics>(&r)) FAIL(d->front().str());
  return std::get<std::vector<theory::Theorem>>(std::move(r));
}

}  // namespace

TEST_SUITE("math") {
  TEST_CASE("concatenation is flattened and drops empties") {
    const auto s = mk_var("S", str), t = mk_var("T", str), e = mk_var("E", ent);
    const auto nested = mk_concat(mk_concat(s, mk_empty("Entry")), mk_concat(mk_singleton(e), t));
    REQUIRE(nested.is(Op::Concat));
    CHECK(nested.arity() == 3);
    CHECK(nested.render() == "S o <E> o T");
    CHECK(mk_concat(mk_empty("Entry"), s) == s);
    CHECK(mk_concat(std::vector<MathExp>{}).is(Op::Empty));
  }

  TEST_CASE("substitution recanonicalizes") {
    const auto s = mk_var("S", str), t = mk_var("T", str), u = mk_var("U", str);
    const auto e = mk_concat(s, t);
    const auto r = substitute(e, {{s.key(), mk_concat(u, u)}, {t.key(), mk_empty("Entry")}});
    CHECK(r.render() == "U o U");
  }

  TEST_CASE("substitution rejects sort mismatches") {
    const auto s = mk_var("S", str);
    CHECK_THROWS_AS(substitute(mk_length(s), {{s.key(), mk_int(3)}}), SortMismatch);
  }

  TEST_CASE("negation flips relations") {
    const auto i = mk_var("I", Sort::integer()), j = mk_var("J", Sort::integer());
    CHECK(negate(mk_le(i, j)) == mk_lt(j, i));
    CHECK(negate(mk_lt(i, j)) == mk_le(j, i));
    CHECK(negate(mk_eq(i, j)) == mk_neq(i, j));
    CHECK(negate(mk_neq(i, j)) == mk_eq(i, j));
  }

  TEST_CASE("prime levels and incoming markers render distinctly") {
    CHECK(mk_var("Q", str, 0).render() == "Q");
    CHECK(mk_var("Q", str, 3).render() == "Q'''");
    CHECK(mk_incoming("Q", str).render() == "#Q");
    CHECK(mk_var("Q", str, 1) != mk_var("Q", str, 2));
    CHECK(has_incoming(mk_eq(mk_var("Q", str), mk_incoming("Q", str))));
  }

  TEST_CASE("rendering parenthesizes only where needed") {
    CHECK(assertion("I + (J - 1) <= max_int").render() == "I + (J - 1) <= max_int");
    CHECK(assertion("(I + J) - 1 <= max_int").render() == "I + J - 1 <= max_int");
    CHECK(assertion("|Reverse(S o T)| = |S| + |T|").render() == "|Reverse(S o T)| = |S| + |T|");
  }

  TEST_CASE("conjunct splitting and free variables") {
    const auto e = assertion("I = #J and J = #I and true");
    CHECK(split_conjuncts(e).size() == 3);
    CHECK(free_vars(e).size() == 4);
  }
}

TEST_SUITE("theory") {
  TEST_CASE("every shipped theorem holds in the finite model") {
    const oracle::ModelParams params;
    for (const auto& t : theory::builtin_theorems()) {
      CAPTURE(t.name);
      oracle::Check c;
      CHECK_NOTHROW(c = oracle::check_theorem(t, params, 2'000'000));
      CHECK_MESSAGE(c.valid, c.counterexample);
      CHECK(c.assignments > 0);
    }
  }

  TEST_CASE("the model catches a false theorem") {
    const auto ts = theorems_from("Theorem COMMUTE: For all u, v : Str, u o v = v o u triggers u o v;");
    const auto c = oracle::check_theorem(ts.front(), {}, 2'000'000);
    CHECK_FALSE(c.valid);
    CHECK(!c.counterexample.empty());
  }

  TEST_CASE("model parameters shrink strings only") {
    std::vector<oracle::Variable> vars;
    for (const char* n : {"u", "v", "w", "x"}) vars.push_back({VarKey{n, 0, false, true}, str});
    vars.push_back({VarKey{"n", 0, false, true}, Sort::integer()});
    const auto p = oracle::fit_budget(vars, {}, 2'000'000);
    CHECK(p.int_lo == -8);
    CHECK(p.int_hi == 8);
    CHECK(oracle::assignment_count(vars, p) <= 2'000'000);
    CHECK(p.alphabet * p.max_len < 12);
  }

  TEST_CASE("string domain sizes") {
    oracle::ModelParams p;
    CHECK(oracle::domain(str, p).size() == 1 + 3 + 9 + 27 + 81);
    CHECK(oracle::domain(Sort::integer(), p).size() == 17);
  }

  TEST_CASE("theory files parse with hypotheses and alternative triggers") {
    const auto ts = theorems_from(
        "Theorem LEN_POS: For all s : Str, if s /= empty_string then 0 < |s| triggers |s|;\n"
        "Theorem PAIR: For all u, v : Str, |u o v| = |v o u| triggers u o v, v o u;\n");
    REQUIRE(ts.size() == 2);
    CHECK(ts[0].hypothesis.has_value());
    CHECK(ts[1].triggers.size() == 2);
    for (const auto& t : ts) CHECK(oracle::check_theorem(t, {}, 2'000'000).valid);
  }

  TEST_CASE("triggers must bind every universal") {
    auto r = theory::parse_theory("Theorem BAD: For all u, v : Str, |u o v| = |u| + |v| triggers |u|;");
    REQUIRE(std::holds_alternative<Diagnostics>(r));
  }

  TEST_CASE("conclusions must be single literals") {
    auto r = theory::parse_theory("Theorem BAD: For all u : Str, 0 <= |u| and true triggers |u|;");
    CHECK(std::holds_alternative<Diagnostics>(r));
  }

  TEST_CASE("standard components check and expose their contracts") {
    const auto& lib = theory::builtin_library();
    for (const char* name : {"Integer_Template", "Stack_Template", "Preemptable_Queue_Template"})
      CHECK(lib.contains(name));
    CHECK(theory::standard_components().size() == 3);
  }
}
