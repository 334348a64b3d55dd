#pragma once

#include <stdexcept>
#include <string>

namespace nlcoh {

// Bad arguments or shapes handed to a library call.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Missing, malformed or inconsistent data on disk.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A simulation or optimisation produced non-finite numbers.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlcoh
