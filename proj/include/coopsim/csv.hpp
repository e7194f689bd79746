#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace coopsim::csv {

// Shortest decimal string that round-trips to the same double. Independent of
// the global locale.
inline std::string number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

// Fixed number of significant digits, for human-facing summaries where
// last-ulp noise from the LP solver is irrelevant.
inline std::string number(double value, int significant_digits) {
  if (!std::isfinite(value)) return number(value);
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, significant_digits);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

}  // namespace coopsim::csv
