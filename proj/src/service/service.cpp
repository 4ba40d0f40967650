#include "keel/service.hpp"

#include "keel/frontend.hpp"
#include "keel/parser.hpp"

#include "httplib.h"

#include <filesystem>
#include <functional>
#include <random>
#include <sstream>

namespace keel::service {

using nlohmann::ordered_json;

namespace {

Reply error(int status, const std::string& message) { return {status, {{"error", message}}}; }

struct Header {
  std::string kind = "unknown";
  std::string name;
  std::string parent;  // concept for enhancements, enhancement (or concept) for realizations
};

Header header_of(const std::string& text) {
  Header h;
  auto parsed = lang::parse_module(text);
  if (auto* m = std::get_if<lang::SourceModule>(&parsed)) {
    h.kind = lang::module_kind_name(m->kind);
    h.name = m->name;
    if (m->kind == lang::ModuleKind::Enhancement) h.parent = m->concept_name;
    if (m->kind == lang::ModuleKind::Realization)
      h.parent = m->enhancement_name.empty() ? m->concept_name : m->enhancement_name;
  }
  return h;
}

}  // namespace

Workspace::Workspace(WorkspaceConfig config) : config_(std::move(config)) {}

std::string Workspace::new_session() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream os;
  os << std::hex << rng() << rng();
  return os.str();
}

std::map<std::string, Workspace::Entry> Workspace::view(const std::string& session) const {
  std::map<std::string, Entry> out;
  if (config_.with_builtins)
    for (const auto& c : theory::standard_components()) out[c.name] = Entry{c.source, true};
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!config_.root.empty())
    for (const auto& f : fs::directory_iterator(config_.root, ec)) {
      if (!f.is_regular_file() || f.path().extension() != ".keel") continue;
      const auto id = f.path().stem().string();
      if (out.contains(id)) continue;  // built-ins win over same-named files
      try {
        out[id] = Entry{driver::read_file(f.path().string()), false};
      } catch (const std::exception&) {
      }
    }
  std::lock_guard lock(mutex_);
  if (auto it = scratch_.find(session); it != scratch_.end())
    for (const auto& [id, text] : it->second)
      if (auto e = out.find(id); e != out.end() && !e->second.builtin) e->second.text = text;
  return out;
}

lang::Library Workspace::library_for(const std::map<std::string, Entry>& v) const {
  driver::SpecSources sources;
  for (const auto& [id, e] : v)
    if (!e.builtin) sources[id] = e.text;
  return driver::make_library(sources, config_.with_builtins);
}

Reply Workspace::components(const std::string& session) const {
  const auto v = view(session);
  struct Node {
    std::string id;
    Header h;
    bool builtin;
  };
  std::vector<Node> nodes;
  std::map<std::string, std::size_t> by_name;  // module name → node
  for (const auto& [id, e] : v) {
    nodes.push_back({id, header_of(e.text), e.builtin});
    if (!nodes.back().h.name.empty()) by_name.try_emplace(nodes.back().h.name, nodes.size() - 1);
  }
  std::vector<std::vector<std::size_t>> children(nodes.size());
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto p = by_name.find(nodes[i].h.parent);
    if (!nodes[i].h.parent.empty() && p != by_name.end() && p->second != i)
      children[p->second].push_back(i);
    else
      roots.push_back(i);
  }
  std::function<ordered_json(std::size_t)> render = [&](std::size_t i) {
    const auto& n = nodes[i];
    ordered_json j{{"id", n.id},
                   {"name", n.h.name.empty() ? n.id : n.h.name},
                   {"kind", n.h.kind},
                   {"editable", !n.builtin},
                   {"children", ordered_json::array()}};
    for (auto c : children[i]) j["children"].push_back(render(c));
    return j;
  };
  ordered_json list = ordered_json::array();
  for (auto r : roots) list.push_back(render(r));
  return {200, {{"components", list}}};
}

Reply Workspace::get_source(const std::string& session, const std::string& id) const {
  const auto v = view(session);
  auto it = v.find(id);
  if (it == v.end()) return error(404, "unknown component '" + id + "'");
  return {200, {{"id", id}, {"editable", !it->second.builtin}, {"text", it->second.text}}};
}

Reply Workspace::put_source(const std::string& session, const std::string& id, std::string text) {
  const auto v = view(session);
  auto it = v.find(id);
  if (it == v.end()) return error(404, "unknown component '" + id + "'");
  if (it->second.builtin) return error(403, "'" + id + "' is read-only");
  const auto size = text.size();
  std::lock_guard lock(mutex_);
  scratch_[session][id] = std::move(text);
  return {200, {{"id", id}, {"bytes", size}}};
}

Reply Workspace::verify(const std::string& session, const std::string& id) const {
  const auto v = view(session);
  auto it = v.find(id);
  if (it == v.end()) return error(404, "unknown component '" + id + "'");
  auto options = config_.verify;
  options.deadline = std::chrono::steady_clock::now() + config_.request_cap;
  auto report = driver::verify_source(it->second.text, id, library_for(v), config_.theorems, options);
  return {report.front_end_failed ? 422 : 200, driver::to_json(report)};
}

Reply Workspace::vc_detail(const std::string& session, const std::string& id, const std::string& vc_id) const {
  const auto v = view(session);
  auto it = v.find(id);
  if (it == v.end()) return error(404, "unknown component '" + id + "'");
  auto analysis = driver::analyze(it->second.text, library_for(v));
  if (auto* d = std::get_if<Diagnostics>(&analysis)) {
    ordered_json diags = ordered_json::array();
    for (const auto& x : *d) diags.push_back(driver::to_json(x));
    return {422, {{"module", id}, {"diagnostics", diags}}};
  }
  for (const auto& vc : std::get<driver::Analysis>(analysis).vcs) {
    if (vc.id != vc_id) continue;
    auto budget = config_.verify.budget;
    budget.timeout = std::min(budget.timeout, config_.request_cap);
    const auto result = prover::prove_vc(vc, config_.theorems, budget);
    ordered_json givens = ordered_json::array();
    const auto relevant = vc::relevant_givens(vc);
    for (std::size_t i = 0; i < vc.givens.size(); ++i)
      givens.push_back({{"n", i + 1}, {"text", vc.givens[i].render()}, {"relevant", bool(relevant[i])}});
    ordered_json trace = ordered_json::array();
    for (const auto& s : result.trace) {
      ordered_json b = ordered_json::object();
      for (const auto& [var, term] : s.bindings) b[var] = term;
      trace.push_back({{"rule", s.rule}, {"bindings", b}, {"fact", s.fact}});
    }
    return {200,
            {{"id", vc.id},
             {"line", vc.line},
             {"kind", vc::kind_name(vc.kind)},
             {"status", prover::status_name(result.status)},
             {"description", vc.description},
             {"goal", vc.goal.render()},
             {"givens", givens},
             {"trace", trace}}};
  }
  return error(404, "unknown VC '" + vc_id + "'");
}

namespace {

std::string cookie_session(const httplib::Request& req) {
  const auto cookies = req.get_header_value("Cookie");
  const std::string key = std::string(session_cookie) + "=";
  for (std::size_t pos = 0; pos < cookies.size();) {
    auto end = cookies.find(';', pos);
    if (end == std::string::npos) end = cookies.size();
    auto item = cookies.substr(pos, end - pos);
    item.erase(0, item.find_first_not_of(' '));
    if (item.rfind(key, 0) == 0) return item.substr(key.size());
    pos = end + 1;
  }
  return {};
}

}  // namespace

void install_routes(httplib::Server& server, Workspace& ws, const ServerConfig& config) {
  // Resolves the caller's session, issuing a cookie on first contact.
  auto session = [&ws](const httplib::Request& req, httplib::Response& res) {
    auto id = cookie_session(req);
    if (id.empty()) {
      id = ws.new_session();
      res.set_header("Set-Cookie", std::string(session_cookie) + "=" + id + "; Path=/; SameSite=Lax");
    }
    return id;
  };
  auto send = [](httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto need_id = [send](const httplib::Request& req, httplib::Response& res) {
    if (req.has_param("id")) return true;
    send(res, error(400, "missing id parameter"));
    return false;
  };

  server.Get("/api/v1/components", [=, &ws](const httplib::Request& req, httplib::Response& res) {
    send(res, ws.components(session(req, res)));
  });
  server.Get("/api/v1/source", [=, &ws](const httplib::Request& req, httplib::Response& res) {
    if (need_id(req, res)) send(res, ws.get_source(session(req, res), req.get_param_value("id")));
  });
  server.Put("/api/v1/source", [=, &ws](const httplib::Request& req, httplib::Response& res) {
    if (need_id(req, res)) send(res, ws.put_source(session(req, res), req.get_param_value("id"), req.body));
  });
  server.Post("/api/v1/verify", [=, &ws](const httplib::Request& req, httplib::Response& res) {
    if (need_id(req, res)) send(res, ws.verify(session(req, res), req.get_param_value("id")));
  });
  server.Get("/api/v1/vc", [=, &ws](const httplib::Request& req, httplib::Response& res) {
    if (!need_id(req, res)) return;
    if (!req.has_param("vc")) return send(res, error(400, "missing vc parameter"));
    send(res, ws.vc_detail(session(req, res), req.get_param_value("id"), req.get_param_value("vc")));
  });
  server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  const auto origin = config.origin;
  server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    if (origin != "*") {
      res.set_header("Access-Control-Allow-Credentials", "true");
      res.set_header("Vary", "Origin");
    }
  });
  if (!config.static_dir.empty()) server.set_mount_point("/", config.static_dir);
}

}  // namespace keel::service
