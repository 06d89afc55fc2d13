#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expression text could not be parsed. `offset()` is the byte offset of the
/// offending token in the input.
class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, MalformedNumber };

  ParseError(Kind kind, std::size_t offset, const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Division by zero, log of a non-positive value, unbound variable, or an
/// elementary function under the exact backend.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// A scenario, family, submanifold or plan violates its invariants.
/// `field()` names the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& detail);

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// An operation was called outside its precondition (point outside U,
/// F(p) not on Z, non-transverse point, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A level-set Z has a rank-deficient defining Jacobian at the queried point.
class RegularityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tvx
