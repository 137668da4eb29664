#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace simpdel {

// Validation / parse failures (bad input content, contract violations).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem-level failures (missing file, unreadable stream).
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

namespace detail {

inline void format_into(std::ostringstream&) {}

template <typename T, typename... Rest>
void format_into(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  format_into(os, rest...);
}

}  // namespace detail

template <typename... Args>
std::string format_msg(const Args&... args) {
  std::ostringstream os;
  detail::format_into(os, args...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void fail(const Args&... args) {
  throw Error(format_msg(args...));
}

template <typename... Args>
[[noreturn]] void fail_io(const Args&... args) {
  throw IoError(format_msg(args...));
}

}  // namespace simpdel
