#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <system_error>

namespace qurate {

// Shortest round-trip decimal form; stable across runs and platforms.
inline std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

inline std::string fmt_int(long long v) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("int formatting failed");
  return std::string(buf, ptr);
}

}  // namespace qurate
