#pragma once

#include <stdexcept>
#include <string>

namespace emoadapt {

// Base of every error the library throws. The CLI maps the subclasses to
// exit codes: ConfigError -> 1, DataError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shape or dimension contract violated by a caller.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Bad argument values that are not shape problems (rates, counts, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Missing, malformed or inconsistent input data (files, manifests, images).
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite values in a loss or its terms.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace emoadapt
