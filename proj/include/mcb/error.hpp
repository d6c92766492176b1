#pragma once

#include <stdexcept>
#include <string>

namespace mcb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition (e.g. r_hat with m1 not in m2).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class SingularSubmodel : public Error {
 public:
  using Error::Error;
};

// Information criterion evaluated on a zero residual sum of squares.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcb
