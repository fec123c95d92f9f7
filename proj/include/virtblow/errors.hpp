#pragma once

#include <stdexcept>
#include <string>

namespace vb {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inversion of zero, or division of a series by a non-unit.
class DivisionByZero : public Error {
 public:
  using Error::Error;
};

/// An operation precondition does not hold (bad constant term, parameter out of range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or inconsistent configuration / input documents.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Linear solving failed: inconsistent, underdetermined or non-affine systems.
class SolveError : public Error {
 public:
  using Error::Error;
};

}  // namespace vb
