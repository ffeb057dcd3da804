#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fractsurf/geometry.hpp"

namespace fractsurf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

// Carries the point where a check failed together with the offending value.
class WitnessError : public Error {
 public:
  WitnessError(const std::string& what, Point2 witness, double value)
      : Error(what), witness_(witness), value_(value) {}
  Point2 witness() const { return witness_; }
  double value() const { return value_; }

 private:
  Point2 witness_;
  double value_;
};

class MagnitudeViolation : public WitnessError {
 public:
  using WitnessError::WitnessError;
};

class BoundaryViolation : public WitnessError {
 public:
  using WitnessError::WitnessError;
};

class CurveError : public Error {
 public:
  using Error::Error;
};

class CompatibilityError : public Error {
 public:
  using Error::Error;
};

class BlendValidationError : public WitnessError {
 public:
  using WitnessError::WitnessError;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_bound)
      : Error(what), last_bound_(last_bound) {}
  double last_bound() const { return last_bound_; }

 private:
  double last_bound_;
};

class CertificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fractsurf
