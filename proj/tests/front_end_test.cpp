#include "support.hpp"

#include "keel/lexer.hpp"
#include "keel/parser.hpp"

#include "doctest.h"

#include <filesystem>

using namespace keel;
using namespace keel::lang;

namespace {

std::vector<Token> lex(const std::string& text) {
  auto r = tokenize(text);
  REQUIRE(std::holds_alternative<std::vector<Token>>(r));
  return std::get<std::vector<Token>>(r);
}

SourceModule parse_ok(const std::string& text) {
  auto r = parse_module(text);
  if (auto* d = std::get_if<Diagnostics>(&r)) FAIL(d->front().str());
  return std::get<SourceModule>(std::move(r));
}

Diagnostic parse_error(const std::string& text) {
  auto r = parse_module(text);
  REQUIRE(std::holds_alternative<Diagnostics>(r));
  return std::get<Diagnostics>(r).front();
}

std::string facility(const std::string& body) {
  return "Facility F;\n" + body + "end F;\n";
}

// A callee Q(updates I, J) and a caller P whose body is `call`.
std::string two_ops(const std::string& call) {
  return "    Operation Q(updates I, J: Integer);\n    Procedure\n    end Q;\n"
         "    Operation P(updates I: Integer);\n    Procedure\n        " +
         call + "\n    end P;\n";
}

}  // namespace

TEST_SUITE("lexer") {
  TEST_CASE("operators are split longest first") {
    auto ts = lex("I :=: J; X := Y /= Z <= 3");
    std::vector<std::string> texts;
    for (const auto& t : ts) texts.push_back(t.text);
    CHECK(texts == std::vector<std::string>{"I", ":=:", "J", ";", "X", ":=", "Y", "/=", "Z", "<=", "3"});
  }

  TEST_CASE("comments vanish and positions are 1-based") {
    auto ts = lex("-- line comment\n(* block\n comment *)  Var");
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].is_keyword("Var"));
    CHECK(ts[0].line == 3);
    CHECK(ts[0].column == 14);
  }

  TEST_CASE("keywords versus identifiers") {
    auto ts = lex("Procedure Proc o oo");
    CHECK(ts[0].is(TokenKind::Keyword));
    CHECK(ts[1].is(TokenKind::Identifier));
    CHECK(ts[2].is_op("o"));
    CHECK(ts[3].is(TokenKind::Identifier));
  }

  TEST_CASE("stray characters are reported with their position") {
    auto r = tokenize("Var X;\n  $");
    REQUIRE(std::holds_alternative<Diagnostics>(r));
    const auto& d = std::get<Diagnostics>(r).front();
    CHECK(d.line == 2);
    CHECK(d.column == 3);
  }

  TEST_CASE("unterminated block comment is an error") {
    CHECK(std::holds_alternative<Diagnostics>(tokenize("(* never closed")));
  }
}

TEST_SUITE("parser") {
  TEST_CASE("every corpus module survives print and reparse") {
    for (const auto& f : std::filesystem::directory_iterator(KEEL_CORPUS_DIR)) {
      if (f.path().extension() != ".keel") continue;
      CAPTURE(f.path().filename().string());
      const auto first = parse_ok(driver::read_file(f.path().string()));
      const auto printed = print_module(first);
      const auto second = parse_ok(printed);
      CHECK(print_module(second) == printed);
      CHECK(second.name == first.name);
      CHECK(second.kind == first.kind);
      CHECK(second.procedures.size() == first.procedures.size());
    }
  }

  TEST_CASE("module header fields") {
    const auto m = parse_ok(driver::read_file(test::fixture_path("invert_faulty")));
    CHECK(m.kind == ModuleKind::Realization);
    CHECK(m.name == "Recursive_Inversion_Faulty");
    CHECK(m.enhancement_name == "Inversion");
    CHECK(m.concept_name == "Preemptable_Queue_Template");
    REQUIRE(m.procedures.size() == 1);
  }

  TEST_CASE("assertions bind o tighter than = and 'and' loosest") {
    auto r = parse_assertion("Q = <E> o #Q and |Q| /= 0");
    REQUIRE(std::holds_alternative<math::MathExp>(r));
    const auto e = std::get<math::MathExp>(r);
    REQUIRE(e.is(math::Op::And));
    CHECK(e.child(0).is(math::Op::Eq));
    CHECK(e.child(0).child(1).is(math::Op::Concat));
    CHECK(e.child(1).is(math::Op::Neq));
  }

  TEST_CASE("mismatched end name") {
    const auto d = parse_error("Facility F;\nend G;\n");
    CHECK(d.line == 2);
    CHECK(d.message.find("does not close") != std::string::npos);
  }

  TEST_CASE("math notation in code is rejected") {
    const auto d = parse_error(facility(
        "    Operation P(updates Q: Integer);\n"
        "    Procedure\n"
        "        Q := |Q|;\n"
        "    end P;\n"));
    CHECK(d.line == 4);
    CHECK(d.message.find("not allowed in executable code") != std::string::npos);
  }

  TEST_CASE("primes are reserved for display") {
    CHECK(std::holds_alternative<Diagnostics>(parse_assertion("Q' = Q")));
  }

  TEST_CASE("duplicate loop clauses") {
    const auto d = parse_error(facility(
        "    Operation P(updates I: Integer);\n"
        "    Procedure\n"
        "        While I /= 0\n"
        "            maintaining true;\n"
        "            maintaining true;\n"
        "            decreasing I;\n"
        "        do\n"
        "            I := I - 1;\n"
        "        end;\n"
        "    end P;\n"));
    CHECK(d.message == "duplicate maintaining clause");
  }
}

TEST_SUITE("checker") {
  TEST_CASE("the corpus checks cleanly") {
    for (const auto& f : std::filesystem::directory_iterator(KEEL_CORPUS_DIR)) {
      if (f.path().extension() != ".keel") continue;
      CAPTURE(f.path().filename().string());
      CHECK(test::first_error(driver::read_file(f.path().string())) == "");
    }
  }

  TEST_CASE("unknown operation") {
    CHECK(test::first_error(facility("    Operation P(updates I: Integer);\n    Procedure\n        Frob(I);\n    end P;\n")) ==
          "unresolved operation 'Frob'");
  }

  TEST_CASE("undeclared variable") {
    CHECK(test::first_error(facility("    Operation P(updates I: Integer);\n    Procedure\n        I := K;\n    end P;\n")) ==
          "unresolved name 'K'");
  }

  TEST_CASE("loop without decreasing clause") {
    const auto msg = test::first_error(facility(
        "    Operation P(updates I: Integer);\n    Procedure\n        While I /= 0\n            maintaining true;\n"
        "        do\n            I := I - 1;\n        end;\n    end P;\n"));
    CHECK(msg.find("needs a decreasing clause") != std::string::npos);
  }

  TEST_CASE("self call needs Recursive") {
    const auto msg = test::first_error(
        "Realization R for Inversion of Preemptable_Queue_Template;\n"
        "    Procedure Invert(updates Q: P_Queue);\n"
        "        Invert(Q);\n"
        "    end Invert;\n"
        "end R;\n");
    CHECK(msg == "'Invert' calls itself but is not declared Recursive");
  }

  TEST_CASE("recursive procedure without decreasing") {
    const auto msg = test::first_error(
        "Realization R for Inversion of Preemptable_Queue_Template;\n"
        "    Recursive Procedure Invert(updates Q: P_Queue);\n"
        "        Invert(Q);\n"
        "    end Invert;\n"
        "end R;\n");
    CHECK(msg == "recursive procedure 'Invert' needs a decreasing clause");
  }

  TEST_CASE("expression passed to a non-evaluates parameter") {
    const auto msg = test::first_error(
        "Realization R for Inversion of Preemptable_Queue_Template;\n"
        "    Procedure Invert(updates Q: P_Queue);\n"
        "        Var E: Entry;\n"
        "        Var N: Integer;\n"
        "        N := Length(Q) + 1;\n"
        "        Enqueue(E, Q);\n"
        "    end Invert;\n"
        "end R;\n");
    CHECK(msg == "");
    const auto bad = test::first_error(facility(two_ops("Q(I + 1, I);")));
    CHECK(bad.find("is an expression but parameter") != std::string::npos);
  }

  TEST_CASE("argument sorts are checked") {
    const auto msg = test::first_error(
        "Realization R for Inversion of Preemptable_Queue_Template;\n"
        "    Procedure Invert(updates Q: P_Queue);\n"
        "        Var N: Integer;\n"
        "        Enqueue(N, Q);\n"
        "    end Invert;\n"
        "end R;\n");
    CHECK(msg.find("has sort") != std::string::npos);
  }

  TEST_CASE("aliasing a variable across mutable parameters") {
    const auto msg = test::first_error(facility(two_ops("Q(I, I);")));
    CHECK(msg == "variable 'I' is passed more than once to 'Q'");
  }

  TEST_CASE("duplicate local") {
    const auto msg = test::first_error(facility(
        "    Operation P(updates I: Integer);\n    Procedure\n        Var I: Integer;\n    end P;\n"));
    CHECK(msg == "duplicate variable 'I'");
  }

  TEST_CASE("realization must match its enhancement") {
    const auto msg = test::first_error(
        "Realization R for Inversion of Stack_Template;\n"
        "    Procedure Invert(updates Q: P_Queue);\n"
        "    end Invert;\n"
        "end R;\n");
    CHECK(msg.find("extends 'Preemptable_Queue_Template'") != std::string::npos);
  }

  TEST_CASE("procedure signature must equal the operation's") {
    const auto msg = test::first_error(
        "Realization R for Inversion of Preemptable_Queue_Template;\n"
        "    Procedure Invert(restores Q: P_Queue);\n"
        "    end Invert;\n"
        "end R;\n");
    CHECK(msg == "procedure 'Invert' does not match the parameters of its operation");
  }

  TEST_CASE("diagnostics carry the offending line") {
    auto r = driver::analyze(facility("    Operation P(updates I: Integer);\n    Procedure\n\n        I := K;\n    end P;\n"),
                             test::corpus_library());
    REQUIRE(std::holds_alternative<Diagnostics>(r));
    CHECK(std::get<Diagnostics>(r).front().line == 5);
  }
}
