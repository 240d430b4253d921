#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hopfimage {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed matrix spec. Carries the byte offset of the offending character.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error("parse error at byte " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Bad arguments, malformed files, shape mismatches.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A dense object would exceed the configured dimension cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant or solver contract did not hold.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hopfimage
