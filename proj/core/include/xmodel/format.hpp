#pragma once

#include <cstdio>
#include <string>

namespace xmodel {

/// Decimal rendering with 12 significant digits; every numeric output of
/// the library and CLI goes through this.
inline std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

}  // namespace xmodel
