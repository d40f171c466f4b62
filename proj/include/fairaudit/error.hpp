#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace fairaudit {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes (data errors -> 3, estimation errors -> 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-range inputs, malformed records, schema mismatches.
class InputError : public Error {
 public:
  using Error::Error;
};

// A denominator of a metric (or an empty group) makes the estimate undefined.
class DegenerateGroupError : public Error {
 public:
  DegenerateGroupError(int group, std::string moment, const std::string& what)
      : Error(what), group_(group), moment_(std::move(moment)) {}

  int group() const noexcept { return group_; }
  const std::string& moment() const noexcept { return moment_; }

 private:
  int group_;
  std::string moment_;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  // max-norm of the score at the last iterate
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace fairaudit
