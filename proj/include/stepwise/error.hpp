#pragma once

#include <stdexcept>
#include <string>

namespace stepwise {

/// Bad argument to a library call (out-of-range j, alpha outside (0,1), ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The model family cannot evaluate the request, e.g. a shifted theta on
/// the uniform null family.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solved stepup ladder decreased somewhere: the model is outside the
/// range where the stepup rule is known to control the FWER.
class NonMonotoneLadder : public std::runtime_error {
 public:
  NonMonotoneLadder(const std::string& what, int index)
      : std::runtime_error(what), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

/// A numerical routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stepwise
