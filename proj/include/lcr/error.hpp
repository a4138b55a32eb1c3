#pragma once

#include <stdexcept>
#include <string>

namespace lcr {

// Errors are grouped by what the caller can do about them: fix the
// configuration, fix the input data, or treat the run as numerically broken.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class InvalidTau : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidRate : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidConfig : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ConfigRankMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ShapeMismatch : public DataError {
 public:
  using DataError::DataError;
};

class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class NonFiniteInput : public DataError {
 public:
  using DataError::DataError;
};

class EmptyEvaluationSet : public DataError {
 public:
  using DataError::DataError;
};

class AllActualsZero : public DataError {
 public:
  using DataError::DataError;
};

class ImaginaryResidueTooLarge : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace lcr
