#include "random_instances.hpp"
#include "support.hpp"

#include "keel/egraph.hpp"
#include "keel/parser.hpp"
#include "keel/prover.hpp"

#include "doctest.h"

using namespace keel;
using namespace keel::math;
using prover::Status;

namespace {

MathExp assertion(const std::string& text) {
  auto r = lang::parse_assertion(text);
  REQUIRE(std::holds_alternative<MathExp>(r));
  return std::get<MathExp>(r);
}

// Parsed names default to integer sort; these helpers set sorts by name.
MathExp sorted(const std::string& text) {
  std::map<std::string, Sort> env{{"S", Sort::string_of("Entry")}, {"T", Sort::string_of("Entry")},
                                  {"U", Sort::string_of("Entry")}, {"E", Sort::entry("Entry")},
                                  {"I", Sort::integer()},           {"J", Sort::integer()},
                                  {"K", Sort::integer()},           {"D", Sort::integer()}};
  auto r = lang::resolve_sorts(assertion(text), env, &env, 1);
  if (auto* d = std::get_if<Diagnostic>(&r)) FAIL(d->str());
  return std::get<MathExp>(r);
}

Status prove(const std::string& goal, const std::vector<std::string>& givens) {
  std::vector<MathExp> gs;
  for (const auto& g : givens) gs.push_back(sorted(g));
  return prover::prove(sorted(goal), gs, theory::builtin_theorems()).status;
}

const vc::VC& find_vc(const std::vector<vc::VC>& vcs, const std::string& id) {
  for (const auto& v : vcs)
    if (v.id == id) return v;
  FAIL("no VC " << id);
  throw;
}

}  // namespace

TEST_SUITE("congruence") {
  TEST_CASE("e-graph and prover agree with the naive closure on random instances") {
    const auto s = oracle::run_congruence_trials(1000, 20240601);
    CHECK(s.instances == 1000);
    CHECK_MESSAGE(s.mismatches == 0, s.first_failure);
  }

  TEST_CASE("naive closure on a known instance") {
    // f(f(f(a))) = a and f(f(f(f(f(a))))) = a give f(a) = a.
    oracle::GroundInstance g;
    g.terms = {{"a", {}}, {"f", {0}}, {"f", {1}}, {"f", {2}}, {"f", {3}}, {"f", {4}}};
    g.equalities = {{3, 0}, {5, 0}};
    const auto cls = oracle::naive_congruence(g);
    for (std::size_t i = 1; i < cls.size(); ++i) CHECK(cls[i] == cls[0]);

    prover::EGraph eg;
    std::vector<prover::TermId> ids;
    for (std::size_t i = 0; i < g.terms.size(); ++i) ids.push_back(eg.add(g.exp(i)));
    eg.merge(ids[3], ids[0]);
    eg.merge(ids[5], ids[0]);
    CHECK(eg.find(ids[1]) == eg.find(ids[0]));
  }

  TEST_CASE("hash-consing shares identical terms") {
    prover::EGraph eg;
    const auto s = mk_var("S", Sort::string_of("Entry"));
    const auto a = eg.add(mk_reverse(s));
    const auto size = eg.size();
    CHECK(eg.add(mk_reverse(s)) == a);
    CHECK(eg.size() == size);
  }
}

TEST_SUITE("linear") {
  TEST_CASE("transitivity of <=") { CHECK(prove("I <= K", {"I <= J", "J <= K"}) == Status::Proved); }
  TEST_CASE("strict from offset") { CHECK(prove("I < J", {"I + 1 <= J"}) == Status::Proved); }
  TEST_CASE("equation substitution") { CHECK(prove("J < I", {"I = J + 2"}) == Status::Proved); }
  TEST_CASE("range reasoning for a sum") {
    CHECK(prove("I + J <= max_int", {"I <= 3", "J <= 3", "7 < max_int"}) == Status::Proved);
  }
  TEST_CASE("lengths are nonnegative") { CHECK(prove("0 <= |S| + |T|", {}) == Status::Proved); }
  TEST_CASE("length of a concatenation") {
    CHECK(prove("|S o T| = |S| + |T|", {}) == Status::Proved);
    CHECK(prove("|S| < |S o <E>|", {}) == Status::Proved);
  }
  TEST_CASE("no unjustified conclusions") {
    CHECK(prove("J <= I", {"I <= J"}) == Status::Unprovable);
    CHECK(prove("I < J", {"I <= J"}) == Status::Unprovable);
    CHECK(prove("I + J <= max_int", {"I <= max_int", "J <= max_int"}) == Status::Unprovable);
  }
  TEST_CASE("decreasing counter") { CHECK(prove("D - 1 < D", {}) == Status::Proved); }
}

TEST_SUITE("prover") {
  TEST_CASE("string theory basics") {
    CHECK(prove("Reverse(S o T) = Reverse(T) o Reverse(S)", {}) == Status::Proved);
    CHECK(prove("Reverse(<E>) = <E>", {}) == Status::Proved);
    CHECK(prove("S = T", {"<E> o S = <E> o T"}) == Status::Proved);
    CHECK(prove("S o T = T o S", {}) == Status::Unprovable);
    CHECK(prove("<E> o Reverse(S) = Reverse(S) o <E>", {}) == Status::Unprovable);
  }

  TEST_CASE("implication goals assume their antecedent") {
    CHECK(prove("S = T implies |S| = |T|", {}) == Status::Proved);
  }

  TEST_CASE("the goal is never asserted") {
    // Same term universe either way; saturation must not depend on polarity.
    for (const auto* stem : {"invert_faulty", "flip_onto_stage2", "exchange_missing_requires"}) {
      const auto a = test::analyze_fixture(stem);
      for (const auto& v : a.vcs) {
        CAPTURE(v.id);
        auto run = [&](const MathExp& goal) {
          prover::ProofSession s;
          for (const auto& g : v.givens) s.assert_fact(g);
          s.intern(goal);
          s.saturate(theory::builtin_theorems());
          return s.fact_snapshot();
        };
        CHECK(run(v.goal) == run(negate(v.goal)));
      }
    }
  }

  TEST_CASE("results are deterministic") {
    const auto a = test::analyze_fixture("copy_queue");
    for (const auto& v : a.vcs) {
      const auto r1 = prover::prove_vc(v, theory::builtin_theorems());
      const auto r2 = prover::prove_vc(v, theory::builtin_theorems());
      CHECK(r1.status == r2.status);
      REQUIRE(r1.trace.size() == r2.trace.size());
      for (std::size_t i = 0; i < r1.trace.size(); ++i) CHECK(r1.trace[i].fact == r2.trace[i].fact);
    }
  }

  TEST_CASE("extra givens never lose a proof") {
    const auto extra = sorted("|U| = 3");
    for (const auto* stem : {"invert_fixed", "exchange_fixed", "flip_onto_stage3"}) {
      for (auto v : test::analyze_fixture(stem).vcs) {
        CAPTURE(v.id);
        REQUIRE(prover::prove_vc(v, theory::builtin_theorems()).status == Status::Proved);
        v.givens.insert(v.givens.begin(), extra);
        v.givens.push_back(sorted("I <= J"));
        CHECK(prover::prove_vc(v, theory::builtin_theorems()).status == Status::Proved);
      }
    }
  }

  TEST_CASE("proved VCs carry a trace ending in the goal") {
    const auto a = test::analyze_fixture("invert_fixed");
    const auto r = prover::prove_vc(find_vc(a.vcs, "0_3"), theory::builtin_theorems());
    REQUIRE(r.status == Status::Proved);
    REQUIRE(!r.trace.empty());
    CHECK(r.trace.back().rule == "goal");
    bool used_rev_concat = false;
    for (const auto& s : r.trace) used_rev_concat |= s.rule == "REV_CONCAT";
    CHECK(used_rev_concat);
  }

  TEST_CASE("unprovable VCs carry no trace") {
    const auto a = test::analyze_fixture("invert_faulty");
    const auto r = prover::prove_vc(find_vc(a.vcs, "0_3"), theory::builtin_theorems());
    CHECK(r.status == Status::Unprovable);
    CHECK(r.trace.empty());
  }

  TEST_CASE("wall-clock budget is honoured") {
    prover::Budget b;
    b.timeout = std::chrono::milliseconds(100);
    const auto r = prover::prove(sorted("S /= T"), {sorted("S = T o S o S"), sorted("T = S o <E> o T")},
                                 theory::builtin_theorems(), b);
    CHECK(r.elapsed_ms < 1000);
    CHECK(r.status != Status::Proved);
  }

  TEST_CASE("cyclic string equations stay bounded") {
    const auto r = prover::prove(sorted("S o S = T o S o <E> o T"), {sorted("S = T o S o <E>")},
                                 theory::builtin_theorems());
    CHECK(r.status != Status::Proved);
  }
}

TEST_SUITE("soundness") {
  TEST_CASE("no proved random VC has a finite counterexample") {
    prover::Budget b;
    b.timeout = std::chrono::milliseconds(250);
    const auto s = oracle::run_soundness_fuzz(2000, 977, 20000, b);
    CHECK(s.vcs == 2000);
    CHECK_MESSAGE(s.violations == 0, s.first_violation);
    CHECK(s.proved >= 500);  // the fuzz must exercise the prover, not just fail to prove
    MESSAGE("proved " << s.proved << " of " << s.vcs << ", " << s.assignments << " assignments checked");
  }

  TEST_CASE("the fuzz oracle detects an unsound claim") {
    const auto s = Sort::string_of("Entry");
    const auto c = oracle::check_entailment({}, mk_eq(mk_concat(mk_var("S", s), mk_var("T", s)),
                                                     mk_concat(mk_var("T", s), mk_var("S", s))),
                                            {}, 20000);
    CHECK_FALSE(c.valid);
  }
}
