#pragma once

#include <stdexcept>
#include <string>

namespace zyg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed spec strings, unknown families, empty inputs, degenerate grids.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A numeric argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The working radius violates (5M+2) r < delta.
class RadiusTooLargeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A dyadic bracket is too coarse to answer the query.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A set indicator contradicted itself across parent and child cubes.
class IndicatorLogicError : public Error {
 public:
  using Error::Error;
};

}  // namespace zyg
