#pragma once

// Componentwise-order vector algebra on R^n.
//
// Comparisons are exact; callers that need tolerances apply them explicitly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isotone/errors.hpp"

namespace isotone {

/// Immutable finite vector in R^n, n >= 1.
class Vector {
public:
  Vector(std::initializer_list<double> values) : Vector(std::vector<double>(values)) {}

  explicit Vector(std::vector<double> values) : entries_(std::move(values)) {
    if (entries_.empty()) throw DimensionError("vector must have at least one entry");
    for (double x : entries_)
      if (!std::isfinite(x)) throw ValidationError("vector entries must be finite");
  }

  static Vector filled(std::size_t n, double value) {
    return Vector(std::vector<double>(n, value));
  }

  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::span<const double> values() const noexcept { return entries_; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  friend bool operator==(const Vector&, const Vector&) = default;

private:
  std::vector<double> entries_;
};

/// Vector whose entries are all strictly positive: an element of the open
/// positive orthant.
class PositiveVector {
public:
  PositiveVector(std::initializer_list<double> values) : PositiveVector(Vector(values)) {}

  explicit PositiveVector(std::vector<double> values) : PositiveVector(Vector(std::move(values))) {}

  explicit PositiveVector(Vector v) : v_(std::move(v)) {
    for (double x : v_)
      if (!(x > 0.0)) throw ValidationError("positive vector entries must be > 0");
  }

  /// True iff every entry of `v` is strictly positive.
  static bool admits(const Vector& v) noexcept {
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  }

  std::size_t size() const noexcept { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<const double> values() const noexcept { return v_.values(); }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  const Vector& vector() const noexcept { return v_; }
  operator const Vector&() const noexcept { return v_; }

  friend bool operator==(const PositiveVector&, const PositiveVector&) = default;

private:
  Vector v_;
};

namespace detail {

inline void require_same_size(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw DimensionError("incompatible lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
}

template <class Op>
Vector zip(const Vector& a, const Vector& b, Op op) {
  require_same_size(a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(a[i], b[i]);
  return Vector(std::move(out));
}

}  // namespace detail

/// a <= b componentwise.
inline bool leq(const Vector& a, const Vector& b) {
  detail::require_same_size(a, b);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] <= b[i])) return false;
  return true;
}

/// a < b in every component.
inline bool lt_strict(const Vector& a, const Vector& b) {
  detail::require_same_size(a, b);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] < b[i])) return false;
  return true;
}

/// a <= b and a != b.
inline bool lneq(const Vector& a, const Vector& b) { return leq(a, b) && !(a == b); }

/// True iff neither a <= b nor b <= a.
inline bool incomparable(const Vector& a, const Vector& b) { return !leq(a, b) && !leq(b, a); }

/// Entrywise (Schur) product.
inline Vector hadamard(const Vector& a, const Vector& b) {
  return detail::zip(a, b, [](double x, double y) { return x * y; });
}

inline PositiveVector hadamard(const PositiveVector& a, const PositiveVector& b) {
  return PositiveVector(hadamard(a.vector(), b.vector()));
}

/// Entrywise reciprocal 1/y.
inline PositiveVector reciprocal(const PositiveVector& y) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = 1.0 / y[i];
  return PositiveVector(Vector(std::move(out)));
}

inline Vector operator+(const Vector& a, const Vector& b) {
  return detail::zip(a, b, std::plus<>{});
}

inline Vector operator-(const Vector& a, const Vector& b) {
  return detail::zip(a, b, std::minus<>{});
}

inline Vector operator*(double s, const Vector& a) {
  std::vector<double> out(a.begin(), a.end());
  for (double& x : out) x *= s;
  return Vector(std::move(out));
}

/// max_i |a_i - b_i|
inline double sup_distance(const Vector& a, const Vector& b) {
  detail::require_same_size(a, b);
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double sup_norm(const Vector& a) {
  double d = 0.0;
  for (double x : a) d = std::max(d, std::abs(x));
  return d;
}

/// Order interval {y : lower <= y <= upper}.
class OrderedInterval {
public:
  OrderedInterval(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (!leq(lower_, upper_)) throw ValidationError("interval requires lower <= upper");
  }

  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }

  bool contains(const Vector& y) const { return leq(lower_, y) && leq(y, upper_); }

private:
  Vector lower_;
  Vector upper_;
};

inline std::ostream& operator<<(std::ostream& os, const Vector& v) {
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os << ')';
}

inline std::ostream& operator<<(std::ostream& os, const PositiveVector& v) { return os << v.vector(); }

}  // namespace isotone
