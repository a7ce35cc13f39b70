#pragma once

#include "blochflow/bloch.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>

namespace blochflow {

inline constexpr int kMaxSignificantDigits = 12;

/// Shortest decimal that reads back as x, but never more than 12 significant digits.
inline std::string format_number(double x) {
  if (x == 0.0) return "0";
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  for (int prec = 1; prec <= kMaxSignificantDigits; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  return buf;
}

/// x rounded to what format_number would print.
inline double round_for_output(double x) {
  return std::isfinite(x) ? std::strtod(format_number(x).c_str(), nullptr) : x;
}

inline void write_series_csv(std::ostream& out, const DistanceSeries& s) {
  out << "t,D\n";
  for (std::size_t k = 0; k < s.size(); ++k) out << format_number(s.times[k]) << ',' << format_number(s.values[k]) << '\n';
}

}  // namespace blochflow
