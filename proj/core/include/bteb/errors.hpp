#pragma once

#include <stdexcept>
#include <string>

namespace bteb {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A computation could not deliver a trustworthy result (iteration cap,
// cancellation, underflow where a positive quantity was required).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Inconsistent inputs from a caller: mismatched tables, bad config.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace bteb
