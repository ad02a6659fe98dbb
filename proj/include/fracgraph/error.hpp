#pragma once

#include <stdexcept>
#include <string>

namespace fracgraph {

// Bad input: malformed files, invalid parameters, precondition violations.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation ran but could not deliver a trustworthy answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracgraph
