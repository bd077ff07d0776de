#pragma once

#include <string>

#include "gatesim/envelope.hpp"

namespace gatesim {

// Standalone SVG documents.
std::string trajectory_svg(const EntryOutcome& outcome, const GateSpec& gate);
// Trial scatter: entering speed horizontal, entering angle vertical.
std::string envelope_svg(const EnvelopeMap& map);
// Failure rate bars grouped by first-collision position, one series per angle band.
std::string failure_bins_svg(const FailureRateBins& bins);

}  // namespace gatesim
