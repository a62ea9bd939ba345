#pragma once

#include <exception>
#include <stdexcept>
#include <string>

namespace hopjam {

/// Base of every error the library raises. The CLI maps the subclasses to
/// process exit codes (see tools/hopjam.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad parameters, Nyquist violation).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shape or length mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input that makes the operation undefined (e.g. all-zero reference signal).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Requested wavelet scale too small to be represented on the sampling grid.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class CropError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or divergence during training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File missing, unreadable, or malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Rethrows `e` as the same library error type with `context` prepended to
/// its message; foreign exceptions become a plain Error.
[[noreturn]] void rethrow_with_context(std::exception_ptr e, const std::string& context);

}  // namespace hopjam
