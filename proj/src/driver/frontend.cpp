#include "keel/frontend.hpp"

#include "keel/parser.hpp"
#include "keel/theory.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace keel::driver {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

lang::Library make_library(const SpecSources& sources, bool with_builtins, Diagnostics* diags) {
  lang::Library lib = with_builtins ? theory::builtin_library() : lang::Library{};
  std::vector<std::pair<std::string, lang::SourceModule>> concepts, enhancements;
  for (const auto& [label, text] : sources) {
    auto parsed = lang::parse_module(text);
    if (!std::holds_alternative<lang::SourceModule>(parsed)) continue;
    auto& m = std::get<lang::SourceModule>(parsed);
    if (m.kind == lang::ModuleKind::Concept) concepts.emplace_back(label, std::move(m));
    if (m.kind == lang::ModuleKind::Enhancement) enhancements.emplace_back(label, std::move(m));
  }
  auto add_all = [&](auto& group) {
    for (auto& [label, m] : group) {
      if (lib.contains(m.name) && with_builtins && theory::builtin_library().contains(m.name)) continue;
      for (auto d : lib.add(std::move(m))) {
        if (!diags) continue;
        d.message = label + ": " + d.message;
        diags->push_back(std::move(d));
      }
    }
  };
  add_all(concepts);
  add_all(enhancements);
  return lib;
}

SpecSources sibling_specs(const std::string& dir) {
  namespace fs = std::filesystem;
  SpecSources out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir.empty() ? "." : dir, ec)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".keel") continue;
    auto text = read_file(entry.path().string());
    // Cheap pre-filter; the library builder parses properly.
    if (text.find("Concept") == std::string::npos && text.find("Enhancement") == std::string::npos) continue;
    out[entry.path().filename().string()] = std::move(text);
  }
  return out;
}

std::variant<Analysis, Diagnostics> analyze(const std::string& source, const lang::Library& library) {
  auto parsed = lang::parse_module(source);
  if (auto* d = std::get_if<Diagnostics>(&parsed)) return std::move(*d);
  auto checked = lang::check_module(std::get<lang::SourceModule>(std::move(parsed)), library);
  if (auto* d = std::get_if<Diagnostics>(&checked)) return std::move(*d);
  Analysis a{std::get<lang::TypedModule>(std::move(checked)), {}};
  a.vcs = vc::generate_vcs(a.module);
  return a;
}

}  // namespace keel::driver
