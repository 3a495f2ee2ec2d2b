#pragma once

#include <stdexcept>
#include <string>

namespace kmslab {

enum class ErrorCode {
  invalid_argument,  // malformed or inconsistent input
  domain,            // input is well-formed but outside an operation's domain
  numerical,         // an algorithm failed to reach its accuracy target
  parse,             // JSON / text ingestion failure
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

// Default tolerance for every predicate in the library.
inline constexpr double kDefaultTol = 1e-9;

}  // namespace kmslab
