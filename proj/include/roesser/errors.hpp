#pragma once

#include <stdexcept>
#include <string>

namespace roesser {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, channel counts or dimensions do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A well-formed request the library does not implement (e.g. stride for d != 2).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Malformed interchange document.
class ParseError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DimensionError(message);
}

}  // namespace detail
}  // namespace roesser
