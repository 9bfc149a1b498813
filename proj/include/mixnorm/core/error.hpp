#pragma once

#include <stdexcept>
#include <string>

namespace mixnorm {

/// Base class of every error thrown by the library. The CLI maps the
/// concrete type onto its exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the inputs failed (bad grid, bad exponent, mismatch).
class ValidationError : public Error {
public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// NaN/Inf or a quantity that cannot occur in exact arithmetic.
class NumericalAnomaly : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

inline void require(bool condition, const char* field, const std::string& what) {
  if (!condition) throw ValidationError(field, what);
}

}  // namespace mixnorm
