#pragma once

#include "keel/checker.hpp"
#include "keel/diagnostic.hpp"
#include "keel/vc.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace keel::driver {

/// Specification sources keyed by a display label (usually a file name).
using SpecSources = std::map<std::string, std::string>;

/// Builds a library from the standard components (optional) plus every
/// concept and enhancement among `sources`. Sources that fail to parse or
/// are other module kinds are skipped; check failures go to `diags`.
lang::Library make_library(const SpecSources& sources, bool with_builtins, Diagnostics* diags = nullptr);

/// Concept/enhancement sources among the `*.keel` files of a directory.
SpecSources sibling_specs(const std::string& dir);

struct Analysis {
  lang::TypedModule module;
  std::vector<vc::VC> vcs;
};

/// parse → check → generate. Diagnostics on any front-end error.
std::variant<Analysis, Diagnostics> analyze(const std::string& source, const lang::Library& library);

std::string read_file(const std::string& path);

}  // namespace keel::driver
