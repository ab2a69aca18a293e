#pragma once

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>

namespace ntksketch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A vector or tensor had the wrong shape for the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A construction parameter is outside its valid range (even filter size, zero dims, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A kernel argument fell outside [-1, 1] by more than the rounding tolerance.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The input had zero norm where the kernel normalizes by it.
class ZeroInputError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary file (bad magic, truncated payload, unknown dtype).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

/// The ridge system could not be solved (rank deficient at lambda = 0).
class SolveError : public Error {
 public:
  using Error::Error;
};

/// Wraps a per-sample failure during a batch transform with the sample index.
/// The original exception is kept so callers can rethrow and inspect its type.
class BatchError : public Error {
 public:
  BatchError(std::size_t index, const std::string& what, std::exception_ptr cause = nullptr)
      : Error("sample " + std::to_string(index) + ": " + what), index_(index), cause_(cause) {}
  std::size_t index() const noexcept { return index_; }
  std::exception_ptr cause() const noexcept { return cause_; }

 private:
  std::size_t index_;
  std::exception_ptr cause_;
};

}  // namespace ntksketch
