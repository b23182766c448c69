#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace expqbf {

// Base of every exception thrown by the library. The C API maps each
// subclass to its own status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormulaError : public Error {
 public:
  using Error::Error;
};

class ConflictingAssignments : public Error {
 public:
  using Error::Error;
};

class WrongDomain : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class TraceUnavailable : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class SpawnFailure : public Error {
 public:
  using Error::Error;
};

class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class ParseErrorKind {
  MalformedHeader,
  UnterminatedClause,
  UnterminatedQuantifier,
  LiteralOutOfRange,
  QuantifierAfterClauses,
  DuplicateQuantification,
  InvalidToken,
};

const char* to_string(ParseErrorKind kind);

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& detail)
      : Error("line " + std::to_string(line) + ": " + to_string(kind) + ": " + detail),
        kind_(kind),
        line_(line) {}

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

}  // namespace expqbf
