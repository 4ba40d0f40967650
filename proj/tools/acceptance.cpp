// One PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include "finite_model.hpp"
#include "random_instances.hpp"

#include "keel/frontend.hpp"
#include "keel/report.hpp"
#include "keel/theory.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

using namespace keel;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr long exchange_budget_ms = 2000;
constexpr long invert_budget_ms = 2000;
constexpr long flip_stage_budget_ms = 5000;
constexpr long copy_prover_budget_ms = 10000;
constexpr int congruence_instances = 1000;
constexpr int fuzz_vcs = 10000;
constexpr auto fuzz_vc_timeout = std::chrono::milliseconds(250);
constexpr std::size_t fuzz_assignment_budget = 20000;
constexpr std::size_t theorem_assignment_budget = 2'000'000;
constexpr int copy_queue_reference_count = 18;

const std::string corpus = KEEL_CORPUS_DIR;

int failures = 0;

void verdict(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << " -- " << detail << std::endl;
  failures += !ok;
}

std::string path_of(const std::string& stem) { return corpus + "/" + stem + ".keel"; }

const lang::Library& library() {
  static const lang::Library lib = driver::make_library(driver::sibling_specs(corpus), true);
  return lib;
}

driver::VerifyReport verify_text(const std::string& text, const std::string& label) {
  return driver::verify_source(text, label, library(), theory::builtin_theorems(), {});
}

driver::VerifyReport verify_stem(const std::string& stem) {
  return driver::verify_file(path_of(stem), theory::builtin_theorems(), {});
}

std::string status_of(const driver::VcOutcome& o) { return prover::status_name(o.result.status); }

std::string vector_of(const driver::VerifyReport& r) {
  std::string s;
  for (const auto& o : r.vcs) s += (s.empty() ? "" : " ") + o.vc.id + ":" + status_of(o).substr(0, 1);
  return s;
}

std::vector<std::pair<std::string, std::string>> golden(const std::string& stem) {
  std::ifstream in(corpus + "/golden/" + stem + ".status");
  std::vector<std::pair<std::string, std::string>> out;
  std::string id, status;
  while (in >> id >> status) out.emplace_back(id, status);
  return out;
}

bool matches_golden(const driver::VerifyReport& r, const std::string& stem) {
  const auto g = golden(stem);
  if (g.empty() || g.size() != r.vcs.size()) return false;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i].first != r.vcs[i].vc.id || g[i].second != status_of(r.vcs[i])) return false;
  return true;
}

const driver::VcOutcome* find_by_description(const driver::VerifyReport& r, const std::string& prefix) {
  for (const auto& o : r.vcs)
    if (o.vc.description.rfind(prefix, 0) == 0) return &o;
  return nullptr;
}

bool is_unprovable(const driver::VcOutcome* o) { return o && o->result.status == prover::Status::Unprovable; }
bool is_proved(const driver::VcOutcome* o) { return o && o->result.status == prover::Status::Proved; }

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  if (at != std::string::npos) text.replace(at, from.size(), to);
  return text;
}

void exchange() {
  const auto text = driver::read_file(path_of("exchange_missing_requires"));
  const auto broken = verify_text(text, "exchange");
  std::vector<const driver::VcOutcome*> bad;
  for (const auto& o : broken.vcs)
    if (o.result.status != prover::Status::Proved) bad.push_back(&o);
  const int first_line = broken.vcs.empty() ? 0 : broken.vcs.front().vc.line;
  bool ok = broken.vcs.size() == 8 && bad.size() == 2;
  for (const auto* o : bad)
    ok = ok && o->result.status == prover::Status::Unprovable && o->vc.kind == vc::VcKind::OperationPrecondition &&
         o->vc.line == first_line;

  const auto fixed_text =
      replace_once(text, "        ensures", "        requires min_int <= I + J and I + J <= max_int;\n        ensures");
  const auto fixed = verify_text(fixed_text, "exchange");
  ok = ok && fixed_text != text && fixed.vcs.size() == 8 && fixed.all_proved();
  const long ms = std::max(broken.elapsed_ms, fixed.elapsed_ms);
  ok = ok && ms < exchange_budget_ms;
  verdict("exchange", ok,
          std::to_string(broken.vcs.size()) + " VCs [" + vector_of(broken) + "], with requires [" + vector_of(fixed) +
              "], " + std::to_string(ms) + " ms");
}

void invert() {
  const auto text = driver::read_file(path_of("invert_faulty"));
  const auto faulty = verify_text(text, "invert");
  bool ok = faulty.vcs.size() == 4;
  if (ok) {
    const std::array<prover::Status, 4> want{prover::Status::Proved, prover::Status::Proved,
                                             prover::Status::Unprovable, prover::Status::Proved};
    for (std::size_t i = 0; i < 4; ++i) ok = ok && faulty.vcs[i].result.status == want[i];
    ok = ok && faulty.vcs[2].vc.id == "0_3" && faulty.vcs[2].vc.kind == vc::VcKind::ProcedureEnsures;
  }
  const auto fixed_text = replace_once(text, "Inject(E, Q);", "Enqueue(E, Q);");
  const auto fixed = verify_text(fixed_text, "invert");
  ok = ok && fixed_text != text && fixed.vcs.size() == 4 && fixed.all_proved();
  const long ms = std::max(faulty.elapsed_ms, fixed.elapsed_ms);
  ok = ok && ms < invert_budget_ms;
  verdict("invert", ok,
          "faulty [" + vector_of(faulty) + "], Enqueue [" + vector_of(fixed) + "], " + std::to_string(ms) + " ms");
}

void flip_ladder() {
  const auto s1 = verify_stem("flip_onto_stage1");
  const auto s2 = verify_stem("flip_onto_stage2");
  const auto s3 = verify_stem("flip_onto_stage3");
  auto ensures = [](const driver::VerifyReport& r) -> const driver::VcOutcome* {
    for (const auto& o : r.vcs)
      if (o.vc.kind == vc::VcKind::ProcedureEnsures) return &o;
    return nullptr;
  };
  const bool stage1 = is_unprovable(find_by_description(s1, "Requires clause of Pop")) &&
                      is_unprovable(find_by_description(s1, "Requires clause of Push"));
  const bool stage2 = is_proved(find_by_description(s2, "Requires clause of Pop")) && is_unprovable(ensures(s2));
  const bool stage3 = !s3.vcs.empty() && s3.all_proved();
  const bool goldens = matches_golden(s1, "flip_onto_stage1") && matches_golden(s2, "flip_onto_stage2") &&
                       matches_golden(s3, "flip_onto_stage3");
  const long ms = std::max({s1.elapsed_ms, s2.elapsed_ms, s3.elapsed_ms});
  verdict("flip_ladder", stage1 && stage2 && stage3 && goldens && ms < flip_stage_budget_ms,
          "stage1 [" + vector_of(s1) + "], stage2 [" + vector_of(s2) + "], stage3 [" + vector_of(s3) +
              "], goldens " + (goldens ? "match" : "differ") + ", slowest stage " + std::to_string(ms) + " ms");
}

void copy_queue() {
  const auto r = verify_stem("copy_queue");
  long prover_ms = 0;
  for (const auto& o : r.vcs) prover_ms += o.result.elapsed_ms;
  const bool ok = !r.vcs.empty() && r.all_proved() && matches_golden(r, "copy_queue") &&
                  prover_ms <= copy_prover_budget_ms && r.elapsed_ms <= copy_prover_budget_ms;
  verdict("copy_queue", ok,
          std::to_string(r.count(prover::Status::Proved)) + "/" + std::to_string(r.vcs.size()) +
              " proved (golden count; reference count " + std::to_string(copy_queue_reference_count) +
              "), prover " + std::to_string(prover_ms) + " ms, wall " + std::to_string(r.elapsed_ms) + " ms");
}

void oracle_equivalence() {
  const auto cc = oracle::run_congruence_trials(congruence_instances, 4242);
  prover::Budget b;
  b.timeout = fuzz_vc_timeout;
  const auto fz = oracle::run_soundness_fuzz(fuzz_vcs, 31337, fuzz_assignment_budget, b);
  const bool ok = cc.instances >= congruence_instances && cc.mismatches == 0 && fz.vcs >= fuzz_vcs &&
                  fz.violations == 0;
  std::string detail = std::to_string(cc.instances) + " congruence instances, " + std::to_string(cc.mismatches) +
                       " mismatches; " + std::to_string(fz.vcs) + " fuzz VCs, " + std::to_string(fz.proved) +
                       " proved, " + std::to_string(fz.violations) + " violations, " +
                       std::to_string(fz.assignments) + " assignments";
  if (!cc.first_failure.empty()) detail += "; " + cc.first_failure;
  if (!fz.first_violation.empty()) detail += "; " + fz.first_violation;
  verdict("prover_oracles", ok, detail);
}

void theory_validity() {
  int valid = 0, invalid = 0, exceptions = 0;
  std::string first;
  for (const auto& t : theory::builtin_theorems()) {
    try {
      const auto c = oracle::check_theorem(t, {}, theorem_assignment_budget);
      if (c.valid && c.assignments > 0) {
        ++valid;
      } else {
        ++invalid;
        if (first.empty()) first = t.name + ": " + c.counterexample;
      }
    } catch (const std::exception& e) {
      ++exceptions;
      if (first.empty()) first = t.name + ": " + e.what();
    }
  }
  verdict("theory_validity", invalid == 0 && exceptions == 0 && valid > 0,
          std::to_string(valid) + " valid, " + std::to_string(invalid) + " invalid, " + std::to_string(exceptions) +
              " exceptions" + (first.empty() ? "" : "; " + first));
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + KEEL_CLI + "\" " + args + " 2>/dev/null";
  std::FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {};
  std::string out;
  std::array<char, 4096> buf;
  while (auto n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  pclose(pipe);
  return out;
}

void determinism() {
  std::vector<std::string> files;
  for (const auto& f : fs::directory_iterator(corpus))
    if (f.path().extension() == ".keel") files.push_back(f.path().string());
  std::sort(files.begin(), files.end());
  std::string args = "verify --json --no-parallel";
  for (const auto& f : files) args += " \"" + f + "\"";
  const std::regex timing(R"re("ms": [0-9]+)re");
  const auto a = std::regex_replace(run_cli(args), timing, "\"ms\": 0");
  const auto b = std::regex_replace(run_cli(args), timing, "\"ms\": 0");
  verdict("determinism", !a.empty() && a == b && a.find("\"vcs\"") != std::string::npos,
          std::to_string(files.size()) + " modules, " + std::to_string(a.size()) + " bytes per run, " +
              (a == b ? "identical" : "different"));
}

}  // namespace

int main() {
  exchange();
  invert();
  flip_ladder();
  copy_queue();
  oracle_equivalence();
  theory_validity();
  determinism();
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing" << std::endl;
  return failures ? 1 : 0;
}
