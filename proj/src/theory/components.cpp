#include "keel/parser.hpp"
#include "keel/theory.hpp"

#include <stdexcept>

namespace keel::theory {

namespace {

constexpr const char* kIntegerTemplate = R"(Concept Integer_Template;
    Type Integer is modeled by Z;
    Type Boolean is modeled by B;

    Operation Sum(evaluates i, j: Integer): Integer;
        requires min_int <= i + j and i + j <= max_int;
        ensures Sum = i + j;
    Operation Difference(evaluates i, j: Integer): Integer;
        requires min_int <= i - j and i - j <= max_int;
        ensures Difference = i - j;
    Operation Are_Equal(evaluates i, j: Integer): Boolean;
        ensures Are_Equal = (i = j);
    Operation Are_Not_Equal(evaluates i, j: Integer): Boolean;
        ensures Are_Not_Equal = (i /= j);
    Operation Less(evaluates i, j: Integer): Boolean;
        ensures Less = (i < j);
    Operation Less_Or_Equal(evaluates i, j: Integer): Boolean;
        ensures Less_Or_Equal = (i <= j);
end Integer_Template;
)";

constexpr const char* kQueueTemplate = R"(Concept Preemptable_Queue_Template(type Entry);
    Type P_Queue is modeled by Str(Entry);

    Operation Enqueue(alters E: Entry; updates Q: P_Queue);
        ensures Q = #Q o <#E>;
    Operation Dequeue(replaces R: Entry; updates Q: P_Queue);
        requires |Q| /= 0;
        ensures #Q = <R> o Q;
    Operation Inject(alters E: Entry; updates Q: P_Queue);
        ensures Q = <#E> o #Q;
    Operation Length(restores Q: P_Queue): Integer;
        ensures Length = |Q|;
    Operation Clear(clears Q: P_Queue);
end Preemptable_Queue_Template;
)";

constexpr const char* kStackTemplate = R"(Concept Stack_Template(type Entry; Max_Depth: Integer);
    Type Stack is modeled by Str(Entry);
    constraint 0 < Max_Depth;

    Operation Push(alters E: Entry; updates S: Stack);
        requires |S| + 1 <= Max_Depth;
        ensures S = <#E> o #S;
    Operation Pop(replaces R: Entry; updates S: Stack);
        requires |S| /= 0;
        ensures #S = <R> o S;
    Operation Depth(restores S: Stack): Integer;
        ensures Depth = |S|;
end Stack_Template;
)";

}  // namespace

const std::vector<StandardComponent>& standard_components() {
  static const std::vector<StandardComponent> components = {
      {"Integer_Template", kIntegerTemplate},
      {"Preemptable_Queue_Template", kQueueTemplate},
      {"Stack_Template", kStackTemplate},
  };
  return components;
}

const lang::Library& builtin_library() {
  static const lang::Library library = [] {
    lang::Library lib;
    for (const auto& c : standard_components()) {
      auto parsed = lang::parse_module(c.source);
      if (auto* d = std::get_if<Diagnostics>(&parsed))
        throw std::logic_error("standard component " + c.name + " does not parse: " + d->front().str());
      auto diags = lib.add(std::get<lang::SourceModule>(std::move(parsed)));
      if (has_errors(diags)) throw std::logic_error("standard component " + c.name + ": " + diags.front().str());
    }
    return lib;
  }();
  return library;
}

}  // namespace keel::theory
