#pragma once

#include <stdexcept>
#include <string>

namespace thermo {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The map description is not a well-formed circle map with a Markov partition.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A point (or an orbit point) sits exactly on a partition endpoint.
class BoundaryPointError : public Error {
 public:
  using Error::Error;
};

class NotInImageError : public Error {
 public:
  using Error::Error;
};

/// Root finding or an eigen-iteration failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when an asymptotic variance is (numerically) zero, e.g. for coboundaries.
class SigmaZeroError : public Error {
 public:
  using Error::Error;
};

class CensoringError : public Error {
 public:
  using Error::Error;
};

/// Memory guard on cylinder materialization.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace thermo
