#pragma once

#include <stdexcept>
#include <string>

namespace mind {

/// Base of every exception thrown by the library. The C API maps each
/// subclass onto a distinct status code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument lies outside the domain of the operation.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Inputs that do not fit together (grid sizes, lengths, kinds).
class StructuralError : public Error {
public:
  using Error::Error;
};

/// Problem size above a desk-scale cap.
class CapacityError : public Error {
public:
  using Error::Error;
};

/// An estimator or threshold configuration that cannot be honoured.
class ConfigError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

/// Should not happen for valid inputs; indicates a numerical breakdown.
class InternalError : public Error {
public:
  using Error::Error;
};

[[noreturn]] void throw_parameter(const std::string& what);

} // namespace mind
