#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace credo {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Errors that describe the feasible region itself (CLI exit code 3).
class GeometryError : public Error {
 public:
  using Error::Error;
};

class EmptyRegion : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class UnboundedRegion : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class DegenerateGeometry : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class NonVertexDecision : public Error {
 public:
  using Error::Error;
};

class EmptyVertexSet : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class SingularComponent : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyTestSet : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed or out-of-range configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A trial of the experiment runner failed; carries the trial index.
class TrialFailure : public Error {
 public:
  TrialFailure(std::size_t trial, const std::string& what)
      : Error("trial " + std::to_string(trial) + " failed: " + what), trial_(trial) {}

  std::size_t trial() const noexcept { return trial_; }

 private:
  std::size_t trial_;
};

}  // namespace credo
