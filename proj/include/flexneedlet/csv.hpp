#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

namespace flexneedlet::csv {

/// Shortest round-trip decimal form; empty for NaN (undefined entries).
inline std::string number(double v) {
  if (std::isnan(v)) return {};
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string number(long long v) { return std::to_string(v); }
inline std::string number(int v) { return std::to_string(v); }
inline std::string number(std::size_t v) { return std::to_string(v); }

inline void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
}

}  // namespace flexneedlet::csv
