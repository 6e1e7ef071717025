#pragma once

#include <stdexcept>
#include <string>

namespace cointsearch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problems with the input data itself (too short, gaps, bad cells, misaligned).
class DataError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

/// Numerical failures: singular designs, zero-variance inputs, non-convergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularDesignError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A request outside the supported range (table dimension, level, option).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cointsearch
