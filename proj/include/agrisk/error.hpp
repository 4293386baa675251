#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agrisk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input is missing a required column or key.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& message)
      : Error(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(std::string id)
      : Error("duplicate document id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// A single record failed validation. `row()` is 1-based over data rows.
class ValidationError : public Error {
 public:
  ValidationError(std::size_t row, const std::string& message)
      : Error("row " + std::to_string(row) + ": " + message), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Vocabulary filters removed every term.
class EmptyVocabularyError : public Error {
 public:
  using Error::Error;
};

/// Network failure, timeout or non-success status from a remote service.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// A remote answer violated the contiguous-span contract.
class IntegrityError : public Error {
 public:
  IntegrityError(std::size_t start, std::size_t end, const std::string& message)
      : Error(message), start_(start), end_(end) {}
  std::size_t start() const noexcept { return start_; }
  std::size_t end() const noexcept { return end_; }

 private:
  std::size_t start_;
  std::size_t end_;
};

/// Malformed or inconsistent pipeline configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Another process holds the output directory lock.
class LockError : public Error {
 public:
  using Error::Error;
};

/// Pipeline stage failure; wraps the underlying cause with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, int exit_code, const std::string& cause)
      : Error(stage + ": " + cause), stage_(std::move(stage)), exit_code_(exit_code) {}
  const std::string& stage() const noexcept { return stage_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

}  // namespace agrisk
