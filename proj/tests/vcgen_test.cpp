#include "support.hpp"

#include "keel/vc.hpp"

#include "doctest.h"

#include <functional>
#include <regex>
#include <set>

using namespace keel;
using vc::VcKind;

namespace {

std::vector<std::string> ids(const std::vector<vc::VC>& vcs) {
  std::vector<std::string> out;
  for (const auto& v : vcs) out.push_back(v.id);
  return out;
}

bool mentions(const math::MathExp& e, const std::function<bool(const math::MathExp&)>& pred) {
  if (pred(e)) return true;
  for (const auto& c : e.children())
    if (mentions(c, pred)) return true;
  return false;
}

const char* const all_fixtures[] = {"exchange_missing_requires", "exchange_fixed", "invert_faulty", "invert_fixed",
                                    "flip_onto_stage1",          "flip_onto_stage2", "flip_onto_stage3", "copy_queue"};

}  // namespace

TEST_SUITE("vcgen") {
  TEST_CASE("VC counts per fixture") {
    CHECK(test::analyze_fixture("exchange_missing_requires").vcs.size() == 8);
    CHECK(test::analyze_fixture("exchange_fixed").vcs.size() == 8);
    CHECK(test::analyze_fixture("invert_faulty").vcs.size() == 4);
    CHECK(test::analyze_fixture("invert_fixed").vcs.size() == 4);
    CHECK(test::analyze_fixture("flip_onto_stage1").vcs.size() == 9);
    CHECK(test::analyze_fixture("flip_onto_stage2").vcs.size() == 9);
    CHECK(test::analyze_fixture("flip_onto_stage3").vcs.size() == 11);
    CHECK(test::analyze_fixture("copy_queue").vcs.size() == 15);
  }

  TEST_CASE("ids are block_seq with sequences counting from 1 per block") {
    const std::regex shape(R"((\d+)_(\d+))");
    for (const auto* stem : all_fixtures) {
      CAPTURE(stem);
      std::map<int, int> last;
      std::set<std::string> seen;
      for (const auto& v : test::analyze_fixture(stem).vcs) {
        std::smatch m;
        REQUIRE(std::regex_match(v.id, m, shape));
        CHECK(std::stoi(m[1]) == v.block);
        CHECK(std::stoi(m[2]) == v.seq);
        CHECK(v.seq == last[v.block] + 1);
        last[v.block] = v.seq;
        CHECK(seen.insert(v.id).second);
      }
    }
  }

  TEST_CASE("loop blocks: body then exit") {
    CHECK(ids(test::analyze_fixture("flip_onto_stage1").vcs) ==
          std::vector<std::string>{"0_1", "1_1", "1_2", "1_3", "1_4", "1_5", "1_6", "1_7", "2_1"});
  }

  TEST_CASE("goals and givens are pure literals over program values") {
    for (const auto* stem : all_fixtures) {
      CAPTURE(stem);
      for (const auto& v : test::analyze_fixture(stem).vcs) {
        CAPTURE(v.id);
        CHECK((v.goal.is_literal() || v.goal.is(math::Op::True) || v.goal.is(math::Op::Implies)));
        auto impure = [](const math::MathExp& e) { return (e.is(math::Op::Var) && (e.incoming() || e.bound())); };
        CHECK_FALSE(mentions(v.goal, impure));
        for (const auto& g : v.givens) {
          CHECK_FALSE(mentions(g, impure));
          CHECK_FALSE(g.is(math::Op::True));
        }
        std::set<std::string> distinct;
        for (const auto& g : v.givens) CHECK(distinct.insert(g.render()).second);
        CHECK(vc::relevant_givens(v).size() == v.givens.size());
      }
    }
  }

  TEST_CASE("exchange: both Sum obligations sit on the first statement") {
    const auto a = test::analyze_fixture("exchange_missing_requires");
    const auto& vcs = a.vcs;
    CHECK(vcs[0].line == 7);
    CHECK(vcs[1].line == 7);
    CHECK(vcs[0].kind == VcKind::OperationPrecondition);
    CHECK(vcs[1].kind == VcKind::OperationPrecondition);
    CHECK(vcs[0].goal.render() == "min_int <= I + J");
    CHECK(vcs[1].goal.render() == "I + J <= max_int");
    CHECK(vcs[6].kind == VcKind::ProcedureEnsures);
    CHECK(vcs[6].line == 5);  // the ensures clause
  }

  TEST_CASE("invert: the then-path ensures is 0_3 against Reverse of the input") {
    const auto a = test::analyze_fixture("invert_faulty");
    const auto& v = a.vcs[2];
    CHECK(v.id == "0_3");
    CHECK(v.kind == VcKind::ProcedureEnsures);
    CHECK(v.goal.render() == "Q''' = Reverse(Q)");
    std::vector<std::string> givens;
    for (const auto& g : v.givens) givens.push_back(g.render());
    CHECK(givens == std::vector<std::string>{"|Q| /= 0", "Q = <E'> o Q'", "Q'' = Reverse(Q')", "Q''' = <E'> o Q''"});
    CHECK(a.vcs[1].kind == VcKind::TerminationProgress);
    CHECK(a.vcs[3].goal.render() == "Q = Reverse(Q)");
  }

  TEST_CASE("flip stage 1: the Pop obligation knows the counter, not the stack") {
    const auto a = test::analyze_fixture("flip_onto_stage1");
    const auto& pop = a.vcs[1];
    CHECK(pop.description == "Requires clause of Pop for Pop(E, S)");
    CHECK(pop.goal.render() == "|S'| /= 0");
    bool counter_nonzero = false, stack_fact = false;
    for (const auto& g : pop.givens) {
      counter_nonzero |= g.render() == "D'' /= 0";
      stack_fact |= g.render().find("|S'|") != std::string::npos;
    }
    CHECK(counter_nonzero);
    CHECK_FALSE(stack_fact);
  }

  TEST_CASE("lines are anchored inside the module") {
    for (const auto* stem : all_fixtures) {
      const auto a = test::analyze_fixture(stem);
      const auto& m = *a.module.module;
      for (const auto& v : a.vcs) {
        CHECK(v.line >= m.line);
        CHECK(v.line < m.line + m.line_count);
      }
    }
  }

  TEST_CASE("an empty facility yields no VCs") {
    CHECK(test::analyze_text("Facility Empty;\nend Empty;\n").vcs.empty());
  }

  TEST_CASE("an operation ensuring true yields one trivial VC") {
    const auto a = test::analyze_text(
        "Facility T;\n    Operation Nop(updates I: Integer);\n        ensures true;\n    Procedure\n    end Nop;\nend T;\n");
    REQUIRE(a.vcs.size() == 1);
    CHECK(a.vcs[0].goal.is(math::Op::True));
  }

  TEST_CASE("restores parameters are obliged to come back unchanged") {
    const auto a = test::analyze_fixture("copy_queue");
    CHECK(a.vcs.back().kind == VcKind::RestoresObligation);
    CHECK(a.vcs.back().goal.render().find("Q") != std::string::npos);
  }

  TEST_CASE("dump lists the goal and numbered givens") {
    const auto a = test::analyze_fixture("invert_faulty");
    const auto text = vc::dump(a.vcs[2]);
    CHECK(text.find("VC 0_3") == 0);
    CHECK(text.find("Goal:\n    Q''' = Reverse(Q)") != std::string::npos);
    CHECK(text.find("1: |Q| /= 0") != std::string::npos);
    CHECK(text.find("4: Q''' = <E'> o Q''") != std::string::npos);
  }

  TEST_CASE("generation is deterministic") {
    for (const auto* stem : all_fixtures) CHECK(vc::dump(test::analyze_fixture(stem).vcs) == vc::dump(test::analyze_fixture(stem).vcs));
  }
}
