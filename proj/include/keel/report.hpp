#pragma once

#include "keel/checker.hpp"
#include "keel/diagnostic.hpp"
#include "keel/prover.hpp"
#include "keel/theory.hpp"
#include "keel/vc.hpp"

#include "json.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace keel::driver {

struct VerifyOptions {
  prover::Budget budget;
  bool parallel = true;
  // VCs not started by then time out unattempted; started ones get at most
  // the time remaining.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct VcOutcome {
  vc::VC vc;
  prover::ProofResult result;
};

struct VerifyReport {
  std::string module;  // module name, or the source label when parsing failed
  Diagnostics diagnostics;
  bool front_end_failed = false;
  std::vector<VcOutcome> vcs;
  long elapsed_ms = 0;

  int count(prover::Status s) const;
  bool all_proved() const { return !front_end_failed && count(prover::Status::Proved) == static_cast<int>(vcs.size()); }
};

/// Proves every VC; results come back in VC order whether or not the
/// attempts ran concurrently.
std::vector<VcOutcome> prove_all(const std::vector<vc::VC>& vcs, const std::vector<theory::Theorem>& theorems,
                                 const VerifyOptions& options);

/// Full pipeline on one module's text. `label` names the report when the
/// text does not parse far enough to yield a module name.
VerifyReport verify_source(const std::string& source, const std::string& label, const lang::Library& library,
                           const std::vector<theory::Theorem>& theorems, const VerifyOptions& options);

/// Reads `path` and verifies it against the built-ins plus the concepts and
/// enhancements found next to it. I/O failures become diagnostics.
VerifyReport verify_file(const std::string& path, const std::vector<theory::Theorem>& theorems,
                         const VerifyOptions& options);

/// Wire form. `with_timing` = false zeroes every ms field.
nlohmann::ordered_json to_json(const VerifyReport& r, bool with_timing = true);
nlohmann::ordered_json to_json(const Diagnostic& d);

std::string to_table(const VerifyReport& r);

/// 0 all proved, 1 any unprovable or timeout, 2 any front-end failure.
int exit_code(const std::vector<VerifyReport>& reports);

}  // namespace keel::driver
