#pragma once

#include <stdexcept>
#include <string>

namespace isotone {

/// Operands of incompatible length or shape.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A value violates a type invariant (non-finite entry, non-positive entry,
/// negative matrix entry, bad permutation, ...).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method ran out of its iteration budget where a result was
/// required.
class BudgetExhaustedError : public std::runtime_error {
public:
  BudgetExhaustedError(const std::string& what, double lower, double upper)
      : std::runtime_error(what), lower_(lower), upper_(upper) {}

  /// Last bracket of the quantity being computed.
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

private:
  double lower_;
  double upper_;
};

/// The problem has no positive fixed point.
class NonexistenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The requested operation does not support the problem dimension.
class UnsupportedSizeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace isotone
