#pragma once

#include <stdexcept>
#include <string>

namespace rpde {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input text; the message carries the source and line number.
class ParseError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// A measurement window that does not cover every nonzero basis response.
class TruncationError : public Error {
 public:
  using Error::Error;
};

// Linear-solver or QP-solver breakdown. `condition` is an estimate of the
// condition number of the offending operator when one is available, else 0.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double condition = 0.0)
      : Error(what), condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace rpde
