#pragma once

#include <stdexcept>
#include <string>

namespace fgs {

/// Caller broke a documented precondition (size mismatch, index out of range,
/// parameter outside its domain).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A randomized generator ran out of its retry budget.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read/written or did not match its schema.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant did not hold after construction.
class InvariantBreach : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace fgs
