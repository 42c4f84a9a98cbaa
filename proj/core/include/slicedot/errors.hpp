#pragma once

#include <stdexcept>
#include <string>

namespace slicedot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad magic, unparsable row, non-finite literal).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Value outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Incompatible tensor extents.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Problem instance exceeds the budget of an exact solver.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration of an estimator or training run.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Sphere map produced a pre-normalization row with vanishing norm.
class DegenerateMapError : public Error {
 public:
  using Error::Error;
};

/// backward() called on a node that is not a scalar.
class NonScalarRootError : public Error {
 public:
  using Error::Error;
};

}  // namespace slicedot
