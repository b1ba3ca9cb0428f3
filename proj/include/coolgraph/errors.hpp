#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coolgraph {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. `row()` is 1-based within the stream (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error(row ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class DuplicateKeyError : public Error {
 public:
  using Error::Error;
};

/// Input parsed fine but violates a physical contract (A <= 0, wrong edge direction, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

class ReferentialIntegrityError : public Error {
 public:
  ReferentialIntegrityError(const std::string& what, long long offending_id)
      : Error(what), offending_id_(offending_id) {}
  long long offending_id() const noexcept { return offending_id_; }

 private:
  long long offending_id_;
};

/// Argument outside the domain of a rate-model formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace coolgraph
