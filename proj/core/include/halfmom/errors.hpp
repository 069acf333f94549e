#pragma once

#include <stdexcept>
#include <string>

namespace halfmom {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument or configuration supplied by the caller.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// A structural assumption on the coefficient matrices failed
/// (asymmetry, indefiniteness, rank misdetection, ...).
class StructureError : public Error {
 public:
  explicit StructureError(const std::string& msg) : Error(msg) {}
};

/// The requested weight violates the spectral constraint a < 1/lambda_max.
class WeightError : public Error {
 public:
  explicit WeightError(const std::string& msg) : Error(msg) {}
};

/// An integral transform was applied to a function whose tail diverges.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace halfmom
