#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pivm {

/// Base class for every error raised by the library. Carries the name of the
/// module that raised it so front ends can report provenance.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Input violates a documented precondition (domain, parameter range, shape).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A value is not known to enough digits to answer the question asked.
class PrecisionError : public Error {
 public:
  PrecisionError(std::string module, const std::string& what,
                 std::optional<long long> required_precision = std::nullopt)
      : Error(std::move(module), what), required_(required_precision) {}

  /// Suggested working precision that would avoid the failure, when known.
  std::optional<long long> required_precision() const noexcept { return required_; }

 private:
  std::optional<long long> required_;
};

/// Two independent computations that must agree did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace pivm
