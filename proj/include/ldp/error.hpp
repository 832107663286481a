#pragma once

#include <stdexcept>
#include <string>

namespace ldp {

enum class ErrorKind {
  InvalidArgument,
  Validation,
  NonConvergence,
  CutoffOverflow,
  IllConditioned,
  SearchOverflow,
  RejectionExhausted,
  NotInGamma,
  Io,
  Config,
};

const char* to_string(ErrorKind kind);

/// Library-wide exception. `value()` carries the diagnostic number attached to
/// the failure (last residual, condition estimate, offending bound, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, double value = 0.0)
      : std::runtime_error(message), kind_(kind), value_(value) {}

  ErrorKind kind() const { return kind_; }
  double value() const { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

}  // namespace ldp
