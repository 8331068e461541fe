#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace diamond {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed function expression. `position` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Arithmetic left the unsigned 64-bit range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// A window, branch or level lies outside the horizon it is used against,
/// or a search ran out of horizon.
class HorizonError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace diamond
