#pragma once

#include <stdexcept>
#include <string>

namespace abelconv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched shapes, arities or groups between operands.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A configuration value is out of range or inconsistent. `field()` names the
/// offending key so callers can report it in machine-readable form.
class InvalidConfigError : public Error {
 public:
  InvalidConfigError(std::string field, const std::string& message)
      : Error(message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A dense materialization would exceed the configured entry cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The attack cannot take a step (zero gradient).
class DegenerateAttackError : public Error {
 public:
  using Error::Error;
};

}  // namespace abelconv
