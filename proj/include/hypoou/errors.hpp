#pragma once

#include <stdexcept>
#include <string>

namespace hypoou {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input rejected by a structural or configuration rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class BlockSizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RankError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Nonzero entry where the block form demands an exact zero block.
class StructureError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NonPositiveLambda : public Error {
 public:
  using Error::Error;
};

class NonPositiveTime : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class StepTooLarge : public Error {
 public:
  using Error::Error;
};

class PathCountTooSmall : public Error {
 public:
  using Error::Error;
};

class MeshTooCoarse : public Error {
 public:
  using Error::Error;
};

class EpsTooSmallForGrid : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class NoCoverageAtMinR : public Error {
 public:
  using Error::Error;
};

class NoAdmissibleTriples : public Error {
 public:
  using Error::Error;
};

class BadExponent : public Error {
 public:
  using Error::Error;
};

class UnknownCommand : public Error {
 public:
  using Error::Error;
};

/// Config text could not be parsed; carries the offending line and key.
class ParseError : public Error {
 public:
  ParseError(int line, std::string field, const std::string& what)
      : Error("line " + std::to_string(line) + " (" + field + "): " + what),
        line_(line),
        field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace hypoou
