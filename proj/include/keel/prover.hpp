#pragma once

#include "keel/egraph.hpp"
#include "keel/theory.hpp"
#include "keel/vc.hpp"

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace keel::prover {

enum class Status { Proved, Unprovable, Timeout };

const char* status_name(Status s);

struct Budget {
  int max_rounds = 3;
  std::chrono::milliseconds timeout{5000};
  std::size_t max_terms = 4000;   // instantiation stops growing the store past this
  std::size_t max_concat_arity = 8;
  std::size_t max_candidates = 20000;  // instantiations collected per round
};

struct TraceStep {
  std::string rule;  // theorem name, or "goal"
  std::vector<std::pair<std::string, std::string>> bindings;
  std::string fact;
};

struct ProofResult {
  Status status = Status::Unprovable;
  long elapsed_ms = 0;
  std::vector<TraceStep> trace;  // empty unless proved
};

/// One proof attempt: a term store, the relational facts asserted so far,
/// and the instantiation machinery. Facts go in through `assert_fact`; goals
/// are only ever read, never asserted.
class ProofSession {
 public:
  explicit ProofSession(Budget budget = {});
  ~ProofSession();
  ProofSession(ProofSession&&) noexcept;
  ProofSession& operator=(ProofSession&&) noexcept;

  void assert_fact(const math::MathExp& literal);

  /// Interns the terms of `e` without asserting anything.
  void intern(const math::MathExp& e);

  /// Runs instantiation rounds until fixpoint or the round budget.
  /// Throws TimedOut when the wall-clock budget is spent.
  void saturate(const std::vector<theory::Theorem>& theorems);

  /// True when the literal follows from the current facts. Interns its terms.
  bool holds(const math::MathExp& literal);

  /// `a <= b` entailed by the integer facts.
  bool decide_linear(const math::MathExp& literal);

  const EGraph& graph() const;
  /// Instantiations that produced a new fact, in order.
  const std::vector<TraceStep>& trace() const;
  /// Asserted relational facts, rendered, in a canonical order.
  std::vector<std::string> fact_snapshot() const;
  int rounds_run() const;

  struct TimedOut {};

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ProofResult prove(const math::MathExp& goal, const std::vector<math::MathExp>& givens,
                  const std::vector<theory::Theorem>& theorems, const Budget& budget = {});

ProofResult prove_vc(const vc::VC& vc, const std::vector<theory::Theorem>& theorems, const Budget& budget = {});

}  // namespace keel::prover
