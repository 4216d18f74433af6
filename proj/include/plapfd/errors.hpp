#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plapfd {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent inputs: mismatched geometry, CFL violations, margin violations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of a constructor does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A stencil would contain no offsets.
class DegenerateStencilError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// The explicit update produced a non-finite value.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, std::size_t node, long step)
      : Error(what), node_(node), step_(step) {}

  std::size_t node() const noexcept { return node_; }
  /// Time level being computed, or -1 when unknown.
  long step() const noexcept { return step_; }

 private:
  std::size_t node_;
  long step_;
};

/// A numerical procedure (quadrature) failed to reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double estimate)
      : Error(what), estimate_(estimate) {}

  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

}  // namespace plapfd
