#pragma once

#include <stdexcept>

namespace cwsk {

// Malformed, inconsistent, or out-of-contract input data.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A quantity with no defined value (0/0, probabilities outside [0, 1]).
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad command-line flags or API arguments.
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace cwsk
