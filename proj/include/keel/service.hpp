#pragma once

#include "keel/report.hpp"
#include "keel/theory.hpp"

#include "json.hpp"

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace keel::service {

struct WorkspaceConfig {
  std::string root;  // directory of *.keel modules
  bool with_builtins = true;
  std::vector<theory::Theorem> theorems = theory::builtin_theorems();
  driver::VerifyOptions verify;
  std::chrono::milliseconds request_cap{60000};
};

struct Reply {
  int status = 200;
  nlohmann::ordered_json body;
};

/// Module sources visible to the IDE: read-only standard components plus
/// the files under the root, with per-session scratch text shadowing the
/// files. Nothing is written back to disk.
class Workspace {
 public:
  explicit Workspace(WorkspaceConfig config);

  Reply components(const std::string& session) const;
  Reply get_source(const std::string& session, const std::string& id) const;
  Reply put_source(const std::string& session, const std::string& id, std::string text);
  Reply verify(const std::string& session, const std::string& id) const;
  /// One VC with relevance flags and, when proved, the instantiation trace.
  Reply vc_detail(const std::string& session, const std::string& id, const std::string& vc_id) const;

  std::string new_session();

 private:
  struct Entry {
    std::string text;
    bool builtin = false;
  };
  /// Every visible module for a session, keyed by id.
  std::map<std::string, Entry> view(const std::string& session) const;
  lang::Library library_for(const std::map<std::string, Entry>& view) const;

  WorkspaceConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, std::map<std::string, std::string>> scratch_;  // session → id → text
};

struct ServerConfig {
  std::string origin = "*";   // CORS allow-origin
  std::string static_dir;     // served at / when set
};

/// Registers the /api/v1 routes, CORS handling and optional static files.
void install_routes(httplib::Server& server, Workspace& workspace, const ServerConfig& config);

inline constexpr const char* session_cookie = "keel_session";

}  // namespace keel::service
