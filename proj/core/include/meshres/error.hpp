#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace meshres {

// Problems with input data or caller arguments. The command line tool maps
// every Error to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed document; byte_offset points into the original input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset);
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Well-formed input that lacks required members, or vectors whose property
// schema does not line up with what the consumer expects.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Numeric argument outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation applied to a value in the wrong state (e.g. normalizing twice).
class StateError : public Error {
 public:
  using Error::Error;
};

// A broken internal invariant. Exit code 3.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace meshres
