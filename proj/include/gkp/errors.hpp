#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace gkp {

/// Bad input: parameters outside their domain, malformed config, dimension
/// mismatches. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that could not be completed (non-convergence, zero norm
/// after a projection, size caps). The CLI maps this to exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-fatal diagnostics collected along a computation.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

/// Short scientific rendering for diagnostics.
inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace gkp
