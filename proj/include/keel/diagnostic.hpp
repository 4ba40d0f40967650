#pragma once

#include <string>
#include <vector>

namespace keel {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  int line = 1;
  int column = 1;

  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " +
           (severity == Severity::Error ? "error: " : "warning: ") + message;
  }
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

/// Thrown by front-end stages that stop at the first error.
struct FrontEndError {
  Diagnostics diagnostics;
};

}  // namespace keel
