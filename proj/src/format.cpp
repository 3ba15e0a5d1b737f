#include "uncertainty/format.hpp"

#include <cmath>
#include <cstdio>

namespace uncertainty {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buffer[32];
  const int len = std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return std::string(buffer, static_cast<std::size_t>(len));
}

}  // namespace uncertainty
