#pragma once

#include <stdexcept>
#include <string>

namespace maxlab {

// Input violates a documented precondition (bad samples, bad parameters).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested operator is not defined on the requested domain.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A checked invariant failed; the message names the invariant and the node.
class InvariantFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be read, written or parsed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace maxlab
