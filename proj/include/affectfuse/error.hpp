#pragma once

#include <stdexcept>
#include <string>

namespace affectfuse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid numeric parameter (non-finite, out of range).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete input data (CSV, manifest, segmentation).
class IngestError : public Error {
 public:
  using Error::Error;
};

/// Input shorter than an operation requires.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// A documented pre/post-condition between modules was violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Model fitting failed (too few rows per class, dimension mismatch).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace affectfuse
