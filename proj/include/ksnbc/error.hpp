#pragma once

#include <stdexcept>
#include <string>

namespace ksnbc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A field carried NaN or Inf into an operation that requires finite data.
class NonFiniteError : public Error {
 public:
  explicit NonFiniteError(const std::string& where)
      : Error("non-finite value encountered in " + where) {}
};

}  // namespace ksnbc
