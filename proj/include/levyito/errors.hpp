#pragma once

#include <stdexcept>
#include <string>

namespace levyito {

// Base of everything thrown on purpose by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent user configuration (bad parameters, unknown keys,
// unsupported model/feature combinations). CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed input data (files, curves, matrices read from disk). CLI exit code 3.
struct DataError : Error {
  using Error::Error;
};

// Numerical failure at run time (quadrature non-convergence, domain violations
// hit while evaluating, positivity breaches). CLI exit code 4.
struct NumericsError : Error {
  using Error::Error;
};

struct DomainError : NumericsError {
  using NumericsError::NumericsError;
};

struct QuadratureError : NumericsError {
  using NumericsError::NumericsError;
};

struct GridError : NumericsError {
  using NumericsError::NumericsError;
};

struct PositivityError : NumericsError {
  using NumericsError::NumericsError;
};

struct TailError : NumericsError {
  using NumericsError::NumericsError;
};

struct UnsupportedError : ConfigError {
  using ConfigError::ConfigError;
};

struct CurveError : DataError {
  using DataError::DataError;
};

}  // namespace levyito
