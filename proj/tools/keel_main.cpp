#include "keel/frontend.hpp"
#include "keel/report.hpp"
#include "keel/service.hpp"
#include "keel/theory.hpp"

#include "CLI11.hpp"
#include "httplib.h"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace keel;

namespace {

struct ProverFlags {
  long timeout_ms = 5000;
  int rounds = 3;
  std::string theory_dir;
  bool no_parallel = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--timeout-ms", timeout_ms, "Per-VC wall-clock budget")->check(CLI::PositiveNumber);
    cmd->add_option("--rounds", rounds, "Instantiation rounds per VC")->check(CLI::NonNegativeNumber);
    cmd->add_option("--theory-dir", theory_dir, "Extra *.thy theorem files");
    cmd->add_flag("--no-parallel", no_parallel, "Prove VCs one at a time");
  }

  driver::VerifyOptions options() const {
    driver::VerifyOptions o;
    o.budget.timeout = std::chrono::milliseconds(timeout_ms);
    o.budget.max_rounds = rounds;
    o.parallel = !no_parallel;
    return o;
  }

  /// Built-in theorems plus any theory directory; nullopt after printing errors.
  std::optional<std::vector<theory::Theorem>> theorems() const {
    if (theory_dir.empty()) return theory::builtin_theorems();
    auto loaded = theory::load_theories(theory_dir);
    if (auto* d = std::get_if<Diagnostics>(&loaded)) {
      for (const auto& x : *d) std::cerr << theory_dir << ": " << x.str() << "\n";
      return std::nullopt;
    }
    return std::get<std::vector<theory::Theorem>>(std::move(loaded));
  }
};

int cmd_verify(const std::vector<std::string>& paths, const ProverFlags& flags, bool json) {
  auto theorems = flags.theorems();
  if (!theorems) return 2;
  std::vector<driver::VerifyReport> reports;
  for (const auto& p : paths) reports.push_back(driver::verify_file(p, *theorems, flags.options()));
  if (json) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& r : reports) out.push_back(driver::to_json(r));
    std::cout << (reports.size() == 1 ? out[0] : out).dump(2) << "\n";
  } else {
    for (const auto& r : reports) std::cout << driver::to_table(r);
  }
  return driver::exit_code(reports);
}

int cmd_dump(const std::string& path, const std::string& vc_id) {
  std::string source;
  lang::Library library;
  try {
    source = driver::read_file(path);
    library = driver::make_library(driver::sibling_specs(fs::path(path).parent_path().string()), true);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  auto analysis = driver::analyze(source, library);
  if (auto* d = std::get_if<Diagnostics>(&analysis)) {
    for (const auto& x : *d) std::cerr << path << ":" << x.str() << "\n";
    return 2;
  }
  const auto& vcs = std::get<driver::Analysis>(analysis).vcs;
  if (vc_id.empty()) {
    std::cout << vc::dump(vcs);
    return 0;
  }
  for (const auto& v : vcs)
    if (v.id == vc_id) {
      std::cout << vc::dump(v);
      return 0;
    }
  std::cerr << "no VC " << vc_id << " in " << path << "\n";
  return 2;
}

/// Golden files live in `<dir>/golden/<stem>.status`, one "id status" per line.
int cmd_corpus(const std::string& dir, const ProverFlags& flags, bool update) {
  auto theorems = flags.theorems();
  if (!theorems) return 2;
  const fs::path golden_dir = fs::path(dir) / "golden";
  std::vector<fs::path> targets;
  if (update) {
    fs::create_directories(golden_dir);
    for (const auto& f : fs::directory_iterator(dir))
      if (f.path().extension() == ".keel") targets.push_back(f.path());
  } else {
    for (const auto& f : fs::directory_iterator(golden_dir))
      if (f.path().extension() == ".status") targets.push_back(fs::path(dir) / (f.path().stem().string() + ".keel"));
  }
  std::sort(targets.begin(), targets.end());
  int failures = 0;
  for (const auto& target : targets) {
    const auto stem = target.stem().string();
    auto report = driver::verify_file(target.string(), *theorems, flags.options());
    std::string actual;
    for (const auto& o : report.vcs) actual += o.vc.id + " " + prover::status_name(o.result.status) + "\n";
    if (report.front_end_failed) actual = "front-end-error\n";
    const auto golden = golden_dir / (stem + ".status");
    if (update) {
      if (report.vcs.empty() && !report.front_end_failed) continue;  // specifications only
      std::ofstream(golden) << actual;
      std::cout << "wrote " << golden.string() << "\n";
      continue;
    }
    std::string expected;
    try {
      expected = driver::read_file(golden.string());
    } catch (const std::exception& e) {
      expected = e.what();
    }
    const bool ok = expected == actual;
    failures += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << stem << " (" << report.vcs.size() << " VCs, " << report.elapsed_ms
              << " ms)\n";
    if (!ok) std::cout << "  expected:\n" << expected << "  actual:\n" << actual;
  }
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"keel: contract checker and VC prover"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "Verify modules and report each VC");
  std::vector<std::string> paths;
  bool json = false;
  ProverFlags verify_flags;
  verify->add_option("paths", paths, "Module files")->required();
  verify->add_flag("--json", json, "Emit the JSON report");
  verify_flags.attach(verify);

  auto* dump = app.add_subcommand("dump-vcs", "Print generated VCs with goals and givens");
  std::string dump_path, vc_id;
  dump->add_option("path", dump_path, "Module file")->required();
  dump->add_option("--vc", vc_id, "Only this VC id");

  auto* corpus = app.add_subcommand("corpus", "Check fixtures against their golden status files");
  std::string corpus_dir = "corpus";
  bool update = false;
  ProverFlags corpus_flags;
  corpus->add_option("dir", corpus_dir, "Fixture directory");
  corpus->add_flag("--update", update, "Rewrite the golden files");
  corpus_flags.attach(corpus);

  auto* serve = app.add_subcommand("serve", "Serve the workspace API under /api/v1");
  std::string root = ".", host = "127.0.0.1", static_dir, origin = "*";
  int port = 8080;
  bool no_builtins = false;
  long cap_ms = 60000;
  ProverFlags serve_flags;
  serve->add_option("--root", root, "Directory of module files");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--static", static_dir, "Directory served at /");
  serve->add_option("--origin", origin, "CORS allowed origin");
  serve->add_option("--request-cap-ms", cap_ms, "Wall-clock cap per verification")->check(CLI::PositiveNumber);
  serve->add_flag("--no-builtins", no_builtins, "Hide the standard components");
  serve_flags.attach(serve);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return cmd_verify(paths, verify_flags, json);
    if (*dump) return cmd_dump(dump_path, vc_id);
    if (*corpus) return cmd_corpus(corpus_dir, corpus_flags, update);
    if (*serve) {
      auto theorems = serve_flags.theorems();
      if (!theorems) return 2;
      service::WorkspaceConfig wc;
      wc.root = root;
      wc.with_builtins = !no_builtins;
      wc.theorems = std::move(*theorems);
      wc.verify = serve_flags.options();
      wc.request_cap = std::chrono::milliseconds(cap_ms);
      service::Workspace ws(std::move(wc));
      httplib::Server server;
      service::install_routes(server, ws, service::ServerConfig{origin, static_dir});
      const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
      if (bound < 0) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 2;
      }
      std::cout << "listening on http://" << host << ":" << bound << "/api/v1" << std::endl;
      return server.listen_after_bind() ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
