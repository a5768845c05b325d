#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ehrkit {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened / read / written.
class IoError : public Error {
 public:
  using Error::Error;
};

// A required column is missing from a CSV header.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Malformed input data that cannot be skipped (e.g. duplicate row_id).
class DataError : public Error {
 public:
  using Error::Error;
};

// Lookup by id failed; carries the id that was asked for.
class NotFoundError : public Error {
 public:
  NotFoundError(std::int64_t id, const std::string& what)
      : Error(what), id_(id) {}
  std::int64_t id() const { return id_; }

 private:
  std::int64_t id_;
};

// Caller violated a precondition (bad ratio, k out of range, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A rule/vocabulary/trigger file failed to parse; carries the line number.
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Model training could not produce a usable model.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace ehrkit
