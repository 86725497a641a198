#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sclust {

/// Broad failure class; the CLI maps each kind to its own exit status.
enum class ErrorKind {
  config,       ///< invalid parameter or configuration value
  io,           ///< file missing or unreadable/unwritable
  data,         ///< malformed or semantically invalid input data
  computation,  ///< numerical routine failed (non-convergence, degeneracy)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error(ErrorKind::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Malformed cell or row in a delimited file. Row and column are 1-based and
/// count the header as row 1; column 0 means "whole row".
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t row, std::size_t column,
             const std::string& message)
      : DataError(source + ":" + std::to_string(row) +
                  (column > 0 ? ":" + std::to_string(column) : std::string{}) +
                  ": " + message),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class ComputationError : public Error {
 public:
  explicit ComputationError(const std::string& what)
      : Error(ErrorKind::computation, what) {}
};

/// k-means could not produce k nonempty clusters from the given points.
class DegenerateInputError : public ComputationError {
 public:
  explicit DegenerateInputError(const std::string& what)
      : ComputationError(what) {}
};

}  // namespace sclust
