#pragma once

#include <string>

namespace uncertainty {

/// Shortest text form used in every report: 17 significant digits, C locale,
/// so the value round-trips exactly.
std::string format_real(double value);

}  // namespace uncertainty
