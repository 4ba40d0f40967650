#include "keel/report.hpp"

#include "keel/frontend.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <thread>

namespace keel::driver {

int VerifyReport::count(prover::Status s) const {
  return static_cast<int>(std::count_if(vcs.begin(), vcs.end(), [&](const auto& o) { return o.result.status == s; }));
}

std::vector<VcOutcome> prove_all(const std::vector<vc::VC>& vcs, const std::vector<theory::Theorem>& theorems,
                                 const VerifyOptions& options) {
  std::vector<VcOutcome> out(vcs.size());
  auto work = [&](std::size_t i) {
    auto budget = options.budget;
    if (options.deadline) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*options.deadline -
                                                                               std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        out[i] = VcOutcome{vcs[i], prover::ProofResult{prover::Status::Timeout, 0, {}}};
        return;
      }
      budget.timeout = std::min(budget.timeout, left);
    }
    out[i] = VcOutcome{vcs[i], prover::prove_vc(vcs[i], theorems, budget)};
  };
  const std::size_t workers =
      options.parallel ? std::min<std::size_t>(vcs.size(), std::max(1u, std::thread::hardware_concurrency())) : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < vcs.size(); ++i) work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;  // joins at scope exit, before `out` is returned
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < vcs.size();) work(i);
      });
  }
  return out;
}

VerifyReport verify_source(const std::string& source, const std::string& label, const lang::Library& library,
                           const std::vector<theory::Theorem>& theorems, const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  VerifyReport r;
  r.module = label;
  auto analysis = analyze(source, library);
  if (auto* d = std::get_if<Diagnostics>(&analysis)) {
    r.diagnostics = std::move(*d);
    r.front_end_failed = true;
  } else {
    auto& a = std::get<Analysis>(analysis);
    r.module = a.module.module->name;
    r.vcs = prove_all(a.vcs, theorems, options);
  }
  r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return r;
}

VerifyReport verify_file(const std::string& path, const std::vector<theory::Theorem>& theorems,
                         const VerifyOptions& options) {
  const auto label = std::filesystem::path(path).stem().string();
  std::string source;
  lang::Library library;
  try {
    source = read_file(path);
    Diagnostics lib_diags;
    library = make_library(sibling_specs(std::filesystem::path(path).parent_path().string()), true, &lib_diags);
  } catch (const std::exception& e) {
    VerifyReport r;
    r.module = label;
    r.front_end_failed = true;
    r.diagnostics.push_back(Diagnostic{Severity::Error, e.what(), 1, 1});
    return r;
  }
  return verify_source(source, label, library, theorems, options);
}

nlohmann::ordered_json to_json(const Diagnostic& d) {
  return {{"severity", d.severity == Severity::Error ? "error" : "warning"},
          {"line", d.line},
          {"column", d.column},
          {"message", d.message}};
}

nlohmann::ordered_json to_json(const VerifyReport& r, bool with_timing) {
  nlohmann::ordered_json j;
  j["module"] = r.module;
  j["diagnostics"] = nlohmann::ordered_json::array();
  for (const auto& d : r.diagnostics) j["diagnostics"].push_back(to_json(d));
  j["vcs"] = nlohmann::ordered_json::array();
  for (const auto& o : r.vcs) {
    nlohmann::ordered_json v;
    v["id"] = o.vc.id;
    v["line"] = o.vc.line;
    v["kind"] = vc::kind_name(o.vc.kind);
    v["status"] = prover::status_name(o.result.status);
    v["ms"] = with_timing ? o.result.elapsed_ms : 0;
    v["goal"] = o.vc.goal.render();
    v["givens"] = nlohmann::ordered_json::array();
    for (const auto& g : o.vc.givens) v["givens"].push_back(g.render());
    v["description"] = o.vc.description;
    j["vcs"].push_back(std::move(v));
  }
  j["totals"] = {{"vcs", r.vcs.size()},
                 {"proved", r.count(prover::Status::Proved)},
                 {"unprovable", r.count(prover::Status::Unprovable)},
                 {"timeout", r.count(prover::Status::Timeout)},
                 {"ms", with_timing ? r.elapsed_ms : 0}};
  return j;
}

std::string to_table(const VerifyReport& r) {
  std::ostringstream os;
  if (r.front_end_failed) {
    os << r.module << ": front-end errors\n";
    for (const auto& d : r.diagnostics) os << "  " << d.str() << "\n";
    return os.str();
  }
  os << r.module << ": " << r.vcs.size() << " VCs, " << r.count(prover::Status::Proved) << " proved, "
     << r.count(prover::Status::Unprovable) << " unprovable, " << r.count(prover::Status::Timeout) << " timeout ("
     << r.elapsed_ms << " ms)\n";
  if (r.vcs.empty()) return os.str();
  os << std::left << "  " << std::setw(7) << "VC" << std::setw(6) << "Line" << std::setw(29) << "Kind"
     << std::setw(12) << "Status" << std::right << std::setw(6) << "ms" << "  Description\n";
  for (const auto& o : r.vcs)
    os << std::left << "  " << std::setw(7) << o.vc.id << std::setw(6) << o.vc.line << std::setw(29)
       << vc::kind_name(o.vc.kind) << std::setw(12) << prover::status_name(o.result.status) << std::right
       << std::setw(6) << o.result.elapsed_ms << "  " << o.vc.description << "\n";
  return os.str();
}

int exit_code(const std::vector<VerifyReport>& reports) {
  int code = 0;
  for (const auto& r : reports) {
    if (r.front_end_failed) return 2;
    if (!r.all_proved()) code = 1;
  }
  return code;
}

}  // namespace keel::driver
