#pragma once

// Newton's method on F(y) = y - T(y) for small dense systems.

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "isotone/iteration.hpp"

namespace isotone {

namespace detail {

/// Solves a x = b in place (a is n*n row-major, destroyed). Partial pivoting.
/// Returns false when a pivot vanishes.
inline bool solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (!(std::abs(a[piv * n + c]) > 0.0) || !std::isfinite(a[piv * n + c])) return false;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t j = c + 1; j < n; ++j) s -= a[c * n + j] * b[j];
    b[c] = s / a[c * n + c];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(b[i])) return false;
  return true;
}

inline double sup_residual(const Problem& p, std::span<const double> y) {
  const auto t = apply_raw(p, y);
  double r = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) r = std::max(r, std::abs(y[i] - t[i]));
  return r;
}

/// Newton iteration from y (modified in place). Steps are halved until the
/// iterate stays in the positive orthant. Returns the final residual, or
/// +inf when the method broke down.
inline double newton_run(const Problem& p, std::vector<double>& y, double target, std::size_t max_iter) {
  const std::size_t n = p.size();
  const auto& m = p.matrix();
  std::vector<double> jac(n * n), rhs(n), trial(n);
  double res = sup_residual(p, y);
  for (std::size_t it = 0; it < max_iter && res >= target; ++it) {
    // F(y) = y - k + M (1/y);  J_F = I - M diag(1/(y o y)).
    const auto t = apply_raw(p, y);
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] = y[i] - t[i];
      for (std::size_t j = 0; j < n; ++j)
        jac[i * n + j] = (i == j ? 1.0 : 0.0) - m(i, j) / (y[j] * y[j]);
    }
    if (!solve_dense(jac, rhs, n)) return std::numeric_limits<double>::infinity();
    double alpha = 1.0;
    bool moved = false;
    for (int halvings = 0; halvings < 40; ++halvings, alpha *= 0.5) {
      bool positive = true;
      for (std::size_t i = 0; i < n && positive; ++i) {
        trial[i] = y[i] - alpha * rhs[i];
        positive = trial[i] > 0.0 && std::isfinite(trial[i]);
      }
      if (positive) {
        moved = true;
        break;
      }
    }
    if (!moved) return std::numeric_limits<double>::infinity();
    const double next = sup_residual(p, trial);
    if (!std::isfinite(next)) return std::numeric_limits<double>::infinity();
    // Round-off floor reached: the step no longer changes the point.
    bool unchanged = true;
    for (std::size_t i = 0; i < n; ++i) unchanged = unchanged && trial[i] == y[i];
    y = trial;
    res = next;
    if (unchanged) break;
  }
  return res;
}

}  // namespace detail

inline constexpr double kPolishTarget = 1e-12;

/// Refines an approximate fixed point with Newton's method. The refined
/// point is returned only if it lowers the residual and stays within `radius`
/// (sup-norm) of the input; otherwise the input is returned unchanged.
inline PositiveVector newton_polish(const Problem& p, const PositiveVector& y, double target = kPolishTarget,
                                    double radius = 1e-6) {
  detail::require_dim(p, y.size());
  std::vector<double> z(y.begin(), y.end());
  const double before = residual(p, y);
  if (before < 0.01 * target) return y;
  // A few extra iterations past the target squeeze out the last digits.
  double after = detail::newton_run(p, z, 0.01 * target, 50);
  if (!(after < before)) return y;
  PositiveVector out{Vector(std::move(z))};
  if (sup_distance(out, y) > radius * (1.0 + sup_norm(y))) return y;
  return out;
}

}  // namespace isotone
