#pragma once

#include <stdexcept>
#include <string>

namespace rcb {

enum class ErrorKind {
  InvalidArgument,
  TooLarge,
  AllForbidden,
  ZeroSlice,
  Infeasible,
  NonSymmetrizable,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library error; `kind()` lets callers (and the CLI exit-code mapping) branch
/// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace rcb
