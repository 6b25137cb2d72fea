#pragma once

// Decimal rendering for output files: 12 significant digits, always.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace canheight {

inline constexpr int kSignificantDigits = 12;

/// Fixed notation with exactly 12 significant digits; scientific notation
/// when the magnitude is 1e12 or larger. Zero prints as 0.00000000000.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  std::snprintf(buf, sizeof buf, "%.*e", kSignificantDigits - 1, v);
  // Exponent after rounding to 12 digits, so 9.999999999995 lands on 10.
  int exponent = std::atoi(std::strchr(buf, 'e') + 1);
  if (exponent >= kSignificantDigits) return buf;
  int decimals = kSignificantDigits - 1 - exponent;
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace canheight
