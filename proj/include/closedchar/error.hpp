#pragma once

#include <stdexcept>
#include <string>

namespace closedchar {

/// Raised when an input violates an operation's precondition
/// (non-symplectic matrix, parameter out of range, bad config).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot produce an honest answer:
/// non-convergence, ambiguous clustering, unresolved crossings.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace closedchar
