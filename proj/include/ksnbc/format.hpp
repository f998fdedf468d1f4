#pragma once

#include <charconv>
#include <string>
#include <system_error>

#include "ksnbc/error.hpp"

namespace ksnbc {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

/// Parses the whole of `text` as a double; `what` names the source in errors.
inline double parse_double(const std::string& text, const std::string& what) {
  double x = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [end, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || end != last) throw Error(what + ": '" + text + "' is not a number");
  return x;
}

inline int parse_int(const std::string& text, const std::string& what) {
  int x = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [end, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || end != last) throw Error(what + ": '" + text + "' is not an integer");
  return x;
}

}  // namespace ksnbc
