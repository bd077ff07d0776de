#include "gatesim/error.hpp"

namespace gatesim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::DegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::NumericalDivergence: return "numerical-divergence";
    case ErrorKind::IncomparablePlans: return "incomparable-plans";
    case ErrorKind::InfeasibleGeometry: return "infeasible-geometry";
    case ErrorKind::ConfigParse: return "config-parse";
    case ErrorKind::FileWrite: return "file-write";
  }
  return "unknown";
}

}  // namespace gatesim
