#pragma once

#include "keel/frontend.hpp"
#include "keel/theory.hpp"

#include <string>
#include <variant>

namespace keel::test {

inline std::string fixture_path(const std::string& stem) { return std::string(KEEL_CORPUS_DIR) + "/" + stem + ".keel"; }

inline const lang::Library& corpus_library() {
  static const lang::Library lib = driver::make_library(driver::sibling_specs(KEEL_CORPUS_DIR), true);
  return lib;
}

/// Parses, checks and generates; fails the test on front-end errors.
inline driver::Analysis analyze_text(const std::string& text) {
  auto r = driver::analyze(text, corpus_library());
  if (auto* d = std::get_if<Diagnostics>(&r)) {
    std::string all;
    for (const auto& x : *d) all += x.str() + "\n";
    throw std::runtime_error("front-end errors:\n" + all);
  }
  return std::get<driver::Analysis>(std::move(r));
}

inline driver::Analysis analyze_fixture(const std::string& stem) {
  return analyze_text(driver::read_file(fixture_path(stem)));
}

/// First diagnostic of a text that should fail the front end ("" if none).
inline std::string first_error(const std::string& text) {
  auto r = driver::analyze(text, corpus_library());
  if (auto* d = std::get_if<Diagnostics>(&r)) return d->empty() ? "?" : d->front().message;
  return "";
}

}  // namespace keel::test
