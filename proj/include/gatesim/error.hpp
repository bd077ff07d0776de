#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gatesim {

enum class ErrorKind {
  InvalidSpec,
  DegenerateGeometry,
  InvalidInput,
  NumericalDivergence,
  IncomparablePlans,
  InfeasibleGeometry,
  ConfigParse,
  FileWrite,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; `kind()` lets callers branch on the
// failure category without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gatesim
