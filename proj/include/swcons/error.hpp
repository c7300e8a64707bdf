#pragma once

#include <stdexcept>
#include <string>

namespace swcons {

// Values line up with the CLI exit-code contract and the C status codes.
enum class ErrorKind {
  Input = 1,       // malformed or out-of-contract input
  Hypothesis = 2,  // structural/spectral hypothesis not met
  Numerical = 3,   // solver failure, non-finite state, inconsistency
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a sampling period is at or above the admissible supremum.
class BoundViolation : public Error {
 public:
  BoundViolation(const std::string& what, double bound)
      : Error(ErrorKind::Hypothesis, what), bound_(bound) {}

  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

[[noreturn]] inline void fail_input(const std::string& msg) { throw Error(ErrorKind::Input, msg); }
[[noreturn]] inline void fail_hypothesis(const std::string& msg) {
  throw Error(ErrorKind::Hypothesis, msg);
}
[[noreturn]] inline void fail_numerical(const std::string& msg) {
  throw Error(ErrorKind::Numerical, msg);
}

}  // namespace swcons
