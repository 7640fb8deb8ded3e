#pragma once

#include <stdexcept>
#include <string>

namespace mmse {

// Precondition violated by the caller (bad order, bad interval, k over cap...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine produced a non-finite value or lost accuracy.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the Hankel solver when the moment matrix exceeds its
// precision budget.
class IllConditioned : public NumericFailure {
 public:
  IllConditioned(int degree, double condition, const std::string& what)
      : NumericFailure(what), degree_(degree), condition_(condition) {}

  int degree() const noexcept { return degree_; }
  double condition() const noexcept { return condition_; }

 private:
  int degree_;
  double condition_;
};

// Root bracketing ran past its configured search limit.
class OutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed distribution spec or CLI input.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmse
