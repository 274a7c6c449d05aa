#pragma once

#include <stdexcept>
#include <string>

namespace islopt {

// Bad arguments or violated preconditions (CLI exit code 2).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input files (CLI exit code 3).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal solver or invariant failure (CLI exit code 4).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace islopt
