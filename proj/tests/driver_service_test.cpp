#include "support.hpp"

#include "keel/report.hpp"
#include "keel/service.hpp"

#include "doctest.h"
#include "httplib.h"

#include <thread>

using namespace keel;
using json = nlohmann::ordered_json;

namespace {

driver::VerifyReport verify_fixture(const std::string& stem, bool parallel = true) {
  driver::VerifyOptions o;
  o.parallel = parallel;
  return driver::verify_file(test::fixture_path(stem), theory::builtin_theorems(), o);
}

std::vector<std::string> statuses(const json& report) {
  std::vector<std::string> out;
  for (const auto& v : report["vcs"]) out.push_back(v["status"]);
  return out;
}

struct LiveServer {
  service::Workspace ws;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit LiveServer(service::WorkspaceConfig config) : ws(std::move(config)) {
    service::install_routes(server, ws, service::ServerConfig{"http://localhost:5173", ""});
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

service::WorkspaceConfig corpus_workspace() {
  service::WorkspaceConfig c;
  c.root = KEEL_CORPUS_DIR;
  return c;
}

const json* find_node(const json& list, const std::string& id) {
  for (const auto& n : list) {
    if (n["id"] == id) return &n;
    if (auto* hit = find_node(n["children"], id)) return hit;
  }
  return nullptr;
}

}  // namespace

TEST_SUITE("driver") {
  TEST_CASE("report fields appear in wire order") {
    const auto j = driver::to_json(verify_fixture("invert_faulty"));
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"module", "diagnostics", "vcs", "totals"});
    std::vector<std::string> vc_keys;
    for (const auto& [k, v] : j["vcs"][0].items()) vc_keys.push_back(k);
    CHECK(vc_keys == std::vector<std::string>{"id", "line", "kind", "status", "ms", "goal", "givens", "description"});
    std::vector<std::string> total_keys;
    for (const auto& [k, v] : j["totals"].items()) total_keys.push_back(k);
    CHECK(total_keys == std::vector<std::string>{"vcs", "proved", "unprovable", "timeout", "ms"});
  }

  TEST_CASE("totals equal the per-VC statuses") {
    for (const auto* stem : {"exchange_missing_requires", "flip_onto_stage1", "copy_queue"}) {
      const auto j = driver::to_json(verify_fixture(stem));
      int proved = 0, unprovable = 0, timeout = 0;
      for (const auto& s : statuses(j)) {
        proved += s == "proved";
        unprovable += s == "unprovable";
        timeout += s == "timeout";
      }
      CHECK(j["totals"]["vcs"] == j["vcs"].size());
      CHECK(j["totals"]["proved"] == proved);
      CHECK(j["totals"]["unprovable"] == unprovable);
      CHECK(j["totals"]["timeout"] == timeout);
    }
  }

  TEST_CASE("exit codes") {
    CHECK(driver::exit_code({verify_fixture("exchange_fixed")}) == 0);
    CHECK(driver::exit_code({verify_fixture("exchange_missing_requires")}) == 1);
    const auto missing = driver::verify_file(std::string(KEEL_CORPUS_DIR) + "/no_such_module.keel",
                                             theory::builtin_theorems(), {});
    CHECK(missing.front_end_failed);
    CHECK(driver::exit_code({missing}) == 2);
    CHECK(driver::exit_code({verify_fixture("exchange_fixed"), missing}) == 2);
    CHECK(driver::exit_code({}) == 0);
  }

  TEST_CASE("front-end failures carry diagnostics and no VCs") {
    const auto r = driver::verify_source("Facility F;\n  Oops\nend F;\n", "broken", test::corpus_library(),
                                         theory::builtin_theorems(), {});
    CHECK(r.front_end_failed);
    CHECK(r.vcs.empty());
    REQUIRE(!r.diagnostics.empty());
    CHECK(r.diagnostics.front().line == 2);
    const auto j = driver::to_json(r);
    CHECK(j["module"] == "broken");
    CHECK(j["diagnostics"][0]["line"] == 2);
  }

  TEST_CASE("parallel and sequential proving agree") {
    const auto a = driver::to_json(verify_fixture("copy_queue", true), false);
    const auto b = driver::to_json(verify_fixture("copy_queue", false), false);
    CHECK(a.dump() == b.dump());
  }

  TEST_CASE("a spent deadline times out every VC") {
    driver::VerifyOptions o;
    o.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
    const auto r = driver::verify_file(test::fixture_path("invert_fixed"), theory::builtin_theorems(), o);
    CHECK(r.count(prover::Status::Timeout) == 4);
    CHECK(driver::exit_code({r}) == 1);
  }

  TEST_CASE("table output names every VC") {
    const auto text = driver::to_table(verify_fixture("invert_faulty"));
    CHECK(text.find("Recursive_Inversion_Faulty: 4 VCs, 3 proved, 1 unprovable") == 0);
    CHECK(text.find("0_3") != std::string::npos);
  }
}

TEST_SUITE("service") {
  TEST_CASE("component tree nests enhancements and realizations under concepts") {
    service::Workspace ws(corpus_workspace());
    const auto r = ws.components("s");
    REQUIRE(r.status == 200);
    const auto& list = r.body["components"];
    const auto* queue = find_node(list, "Preemptable_Queue_Template");
    REQUIRE(queue);
    CHECK((*queue)["editable"] == false);
    CHECK((*queue)["kind"] == "concept");
    const auto* inversion = find_node((*queue)["children"], "inversion");
    REQUIRE(inversion);
    CHECK(find_node((*inversion)["children"], "invert_faulty"));
    const auto* exchange = find_node(list, "exchange_fixed");
    REQUIRE(exchange);
    CHECK((*exchange)["kind"] == "facility");
    bool top_level = false;
    for (const auto& n : list) top_level |= n["id"] == "exchange_fixed";
    CHECK(top_level);
  }

  TEST_CASE("built-ins only, and an empty workspace") {
    service::Workspace builtins{service::WorkspaceConfig{}};
    CHECK(builtins.components("s").body["components"].size() == 3);
    service::WorkspaceConfig none;
    none.with_builtins = false;
    CHECK(service::Workspace(none).components("s").body["components"].empty());
  }

  TEST_CASE("source access rules") {
    service::Workspace ws(corpus_workspace());
    CHECK(ws.get_source("s", "nope").status == 404);
    CHECK(ws.put_source("s", "nope", "x").status == 404);
    CHECK(ws.put_source("s", "Integer_Template", "x").status == 403);
    const auto builtin = ws.get_source("s", "Stack_Template");
    CHECK(builtin.status == 200);
    CHECK(builtin.body["editable"] == false);
  }

  TEST_CASE("scratch text round-trips bytes and stays in its session") {
    service::Workspace ws(corpus_workspace());
    const std::string text = "-- edited \xE2\x9C\x93\r\nFacility X;\n\tend X;\n";
    CHECK(ws.put_source("alice", "exchange_fixed", text).status == 200);
    CHECK(ws.get_source("alice", "exchange_fixed").body["text"] == text);
    CHECK(ws.get_source("bob", "exchange_fixed").body["text"] ==
          driver::read_file(test::fixture_path("exchange_fixed")));
  }

  TEST_CASE("verification follows the session's edits") {
    service::Workspace ws(corpus_workspace());
    auto before = ws.verify("s", "exchange_missing_requires");
    REQUIRE(before.status == 200);
    CHECK(statuses(before.body) == std::vector<std::string>{"unprovable", "unprovable", "proved", "proved", "proved",
                                                             "proved", "proved", "proved"});
    auto text = driver::read_file(test::fixture_path("exchange_missing_requires"));
    const auto at = text.find("        ensures");
    text.insert(at, "        requires min_int <= I + J and I + J <= max_int;\n");
    ws.put_source("s", "exchange_missing_requires", text);
    const auto after = ws.verify("s", "exchange_missing_requires");
    REQUIRE(after.status == 200);
    CHECK(after.body["totals"]["proved"] == 8);
    CHECK(after.body["vcs"][0]["line"] == 8);  // shifted by the inserted clause
  }

  TEST_CASE("same text, same report") {
    service::Workspace ws(corpus_workspace());
    auto strip = [](json j) {
      for (auto& v : j["vcs"]) v["ms"] = 0;
      j["totals"]["ms"] = 0;
      return j.dump();
    };
    CHECK(strip(ws.verify("a", "flip_onto_stage2").body) == strip(ws.verify("b", "flip_onto_stage2").body));
  }

  TEST_CASE("unparseable text is 422 with line-anchored diagnostics") {
    service::Workspace ws(corpus_workspace());
    ws.put_source("s", "invert_faulty", "Realization R;\n  ???\n");
    const auto r = ws.verify("s", "invert_faulty");
    CHECK(r.status == 422);
    REQUIRE(!r.body["diagnostics"].empty());
    CHECK(r.body["diagnostics"][0]["line"].get<int>() >= 1);
  }

  TEST_CASE("edited specifications reach dependent realizations") {
    service::Workspace ws(corpus_workspace());
    // Weaken Inversion so the faulty body meets it.
    ws.put_source("s", "inversion",
                  "Enhancement Inversion for Preemptable_Queue_Template;\n"
                  "    Operation Invert(updates Q: P_Queue);\n"
                  "        ensures |Q| = |#Q|;\n"
                  "end Inversion;\n");
    const auto r = ws.verify("s", "invert_faulty");
    REQUIRE(r.status == 200);
    CHECK(r.body["totals"]["unprovable"] == 0);
    CHECK(ws.verify("other", "invert_faulty").body["totals"]["unprovable"] == 1);
  }

  TEST_CASE("VC detail has numbered givens and a trace when proved") {
    service::Workspace ws(corpus_workspace());
    const auto faulty = ws.vc_detail("s", "invert_faulty", "0_3");
    REQUIRE(faulty.status == 200);
    CHECK(faulty.body["status"] == "unprovable");
    CHECK(faulty.body["givens"].size() == 4);
    CHECK(faulty.body["givens"][0]["n"] == 1);
    CHECK(faulty.body["trace"].empty());
    const auto fixed = ws.vc_detail("s", "invert_fixed", "0_3");
    CHECK(fixed.body["status"] == "proved");
    CHECK(fixed.body["trace"].back()["rule"] == "goal");
    CHECK(ws.vc_detail("s", "invert_fixed", "9_9").status == 404);
  }

  TEST_CASE("live HTTP endpoints") {
    LiveServer live(corpus_workspace());
    auto cli = live.client();

    auto comps = cli.Get("/api/v1/components");
    REQUIRE(comps);
    CHECK(comps->status == 200);
    CHECK(comps->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
    const auto cookie = comps->get_header_value("Set-Cookie");
    REQUIRE(cookie.rfind("keel_session=", 0) == 0);
    const httplib::Headers session{{"Cookie", cookie.substr(0, cookie.find(';'))}};

    auto pre = cli.Options("/api/v1/verify");
    REQUIRE(pre);
    CHECK(pre->status == 204);
    CHECK(pre->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

    auto verify = cli.Post("/api/v1/verify?id=exchange_missing_requires", session, "", "text/plain");
    REQUIRE(verify);
    CHECK(verify->status == 200);
    const auto report = json::parse(verify->body);
    CHECK(report["totals"]["unprovable"] == 2);
    CHECK(report["vcs"][0]["line"] == 7);

    CHECK(cli.Get("/api/v1/source?id=missing", session)->status == 404);
    CHECK(cli.Put("/api/v1/source?id=Integer_Template", session, "x", "text/plain")->status == 403);
    CHECK(cli.Get("/api/v1/source", session)->status == 400);

    const std::string edited = "Facility Broken;\n  nonsense\nend Broken;\n";
    CHECK(cli.Put("/api/v1/source?id=exchange_fixed", session, edited, "text/plain")->status == 200);
    auto round_trip = cli.Get("/api/v1/source?id=exchange_fixed", session);
    CHECK(json::parse(round_trip->body)["text"] == edited);
    auto broken = cli.Post("/api/v1/verify?id=exchange_fixed", session, "", "text/plain");
    CHECK(broken->status == 422);

    // A different session still sees the file on disk.
    auto fresh = cli.Post("/api/v1/verify?id=exchange_fixed", "", "text/plain");
    CHECK(fresh->status == 200);
    CHECK(json::parse(fresh->body)["totals"]["proved"] == 8);

    auto detail = cli.Get("/api/v1/vc?id=invert_faulty&vc=0_3", session);
    REQUIRE(detail);
    CHECK(json::parse(detail->body)["goal"] == "Q''' = Reverse(Q)");
  }

  TEST_CASE("concurrent sessions do not interleave") {
    LiveServer live(corpus_workspace());
    std::vector<std::thread> threads;
    std::vector<std::string> results(4);
    for (int i = 0; i < 4; ++i)
      threads.emplace_back([&, i] {
        auto cli = live.client();
        const httplib::Headers h{{"Cookie", "keel_session=t" + std::to_string(i)}};
        const auto stem = i % 2 ? "invert_faulty" : "flip_onto_stage3";
        auto r = cli.Post(std::string("/api/v1/verify?id=") + stem, h, "", "text/plain");
        if (r) results[i] = json::parse(r->body)["module"];
      });
    for (auto& t : threads) t.join();
    CHECK(results == std::vector<std::string>{"Flip_Stage3", "Recursive_Inversion_Faulty", "Flip_Stage3",
                                              "Recursive_Inversion_Faulty"});
  }
}
