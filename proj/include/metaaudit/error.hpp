#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace metaaudit {

enum class ErrorKind {
  Domain,
  InsufficientData,
  DegenerateInterval,
  DegenerateWeights,
  Schema,
  Validation,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every error raised by the toolkit. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Domain, what) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& what)
      : Error(ErrorKind::InsufficientData, what) {}
};

class DegenerateIntervalError : public Error {
 public:
  explicit DegenerateIntervalError(const std::string& what)
      : Error(ErrorKind::DegenerateInterval, what) {}
};

class DegenerateWeightsError : public Error {
 public:
  explicit DegenerateWeightsError(const std::string& what)
      : Error(ErrorKind::DegenerateWeights, what) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(ErrorKind::Schema, what) {}
};

/// A data row broke an invariant. `row` is the 1-based line number in the file.
class ValidationError : public Error {
 public:
  ValidationError(std::size_t row, const std::string& what)
      : Error(ErrorKind::Validation, "row " + std::to_string(row) + ": " + what),
        row_(row),
        detail_(what) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t row_;
  std::string detail_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace metaaudit
