#pragma once

#include "keel/checker.hpp"
#include "keel/math_exp.hpp"

#include <string>
#include <vector>

namespace keel::vc {

enum class VcKind {
  OperationPrecondition,
  LoopInvariantBase,
  LoopInvariantPreservation,
  TerminationProgress,
  TerminationBound,
  ProcedureEnsures,
  RestoresObligation,
};

const char* kind_name(VcKind k);

/// One proof obligation: the goal must follow from the givens. Givens are
/// numbered from 1 in the order the generator introduced them.
struct VC {
  std::string id;  // "block_seq"
  int block = 0;
  int seq = 1;
  int line = 1;
  VcKind kind = VcKind::OperationPrecondition;
  math::MathExp goal;
  std::vector<math::MathExp> givens;
  std::string description;
  std::string procedure;
};

/// VCs for every procedure of the module, in emission order. Block numbers
/// continue across procedures so ids stay unique within a module.
std::vector<VC> generate_vcs(const lang::TypedModule& module);

/// Flags givens connected to the goal through shared variables. Unrelated
/// givens are still valid facts; they are only listed last when displayed.
std::vector<bool> relevant_givens(const VC& vc);

/// Human-readable listing used by `dump-vcs` and the service.
std::string dump(const VC& vc);
std::string dump(const std::vector<VC>& vcs);

}  // namespace keel::vc
