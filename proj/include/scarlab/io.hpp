#pragma once

// Locale-free numeric formatting for CSV payloads: '.' decimal point, 17
// significant digits, so identical runs produce byte-identical files.

#include <charconv>
#include <cstdio>
#include <ostream>
#include <string>
#include <system_error>

namespace scarlab {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  if (res.ec != std::errc())
    throw std::runtime_error("float formatting failed");
  return std::string(buf, res.ptr);
}

inline std::ostream& put_csv(std::ostream& os, double v) {
  return os << format_double(v);
}

}  // namespace scarlab
