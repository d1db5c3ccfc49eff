#pragma once

#include <stdexcept>
#include <string>

namespace dotmark {

/// Bad arguments or preconditions supplied by the caller.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed grid file. Carries the 1-based row/column of the offending token.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { EmptyFile, RaggedRow, NegativeValue, NotAnInteger, NonSquare, AllZero };

  ParseError(Kind kind, int row, int column, const std::string& what)
      : std::runtime_error(what), kind_(kind), row_(row), column_(column) {}

  Kind kind() const noexcept { return kind_; }
  int row() const noexcept { return row_; }
  int column() const noexcept { return column_; }

 private:
  Kind kind_;
  int row_;
  int column_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal data structure corruption (e.g. a basis that is no longer a spanning tree).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A solver hit its configured iteration cap.
class IterationLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (factorization, non-finite objective, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dotmark
