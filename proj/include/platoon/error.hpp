#pragma once

#include <stdexcept>
#include <string>

namespace platoon {

enum class ErrorKind {
  Parse,
  InvalidProblem,
  NonConvergence,
  Domain,
  NoBreakpoint,
  NoPositiveRoot,
  Io,
};

// Category names are stable; the CLI prints them on stderr.
const char* error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace platoon
