#pragma once

#include <stdexcept>
#include <string>

namespace lrphase {

/// Failure classes surfaced by the library. The CLI maps each class onto a
/// distinct exit code.
enum class ErrorKind {
  InvalidArgument,
  OutOfRange,
  NoSolution,
  SingularityApproach,
  NumericDerivativeFailure,
  ConfigInvalid,
  VerificationFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& what) : Error(ErrorKind::OutOfRange, what) {}
};

class NoSolution : public Error {
 public:
  explicit NoSolution(const std::string& what) : Error(ErrorKind::NoSolution, what) {}
};

/// Raised when the invariant angle lambda leaves (guard, pi - guard).
class SingularityApproach : public Error {
 public:
  SingularityApproach(const std::string& what, double time)
      : Error(ErrorKind::SingularityApproach, what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class NumericDerivativeFailure : public Error {
 public:
  explicit NumericDerivativeFailure(const std::string& what)
      : Error(ErrorKind::NumericDerivativeFailure, what) {}
};

class ConfigInvalid : public Error {
 public:
  explicit ConfigInvalid(const std::string& what) : Error(ErrorKind::ConfigInvalid, what) {}
};

class VerificationFailure : public Error {
 public:
  explicit VerificationFailure(const std::string& what)
      : Error(ErrorKind::VerificationFailure, what) {}
};

}  // namespace lrphase
