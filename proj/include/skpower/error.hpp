#pragma once

#include <stdexcept>
#include <string>

namespace skpower {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its documented range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed (rank deficiency, indefiniteness, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace skpower
