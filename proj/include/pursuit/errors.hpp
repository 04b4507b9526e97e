#pragma once

#include <stdexcept>
#include <string>

namespace pursuit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidLayout : public Error {
 public:
  using Error::Error;
};

class IllegalAction : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

/// No hypothesised strategy can explain the observed history.
class InconsistentHistory : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace pursuit
