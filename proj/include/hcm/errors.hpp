#pragma once

#include <stdexcept>
#include <string>

namespace hcm {

// Requested operating point lies outside the hybrid regime (T_s below 1/N).
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Gain calibration could not bracket or converge to a unity-gain root.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A quadrature failed to reach the requested tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Estimator invoked with too few samples.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration file rejected; message carries the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hcm
