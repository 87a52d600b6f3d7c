#pragma once

// Problem construction from DC circuits with constant-power loads.
//
// A load drawing power P_i > 0 at node voltage v_i injects the current
// -P_i / v_i; with the resistive network summarised by Mbar the node
// voltages satisfy v = k - Mbar diag(P) (1/v).

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "isotone/errors.hpp"
#include "isotone/iteration.hpp"

namespace isotone {

namespace detail {

inline void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw ValidationError(std::string(field) + " must be a finite value > 0");
}

}  // namespace detail

/// M = Mbar diag(P) together with the offset k. Rejects any negative entry
/// of the assembled M, since the theory assumes M is nonnegative.
inline Problem build_general(const std::vector<std::vector<double>>& mbar, const Vector& power, const Vector& k) {
  const std::size_t n = k.size();
  if (mbar.size() != n || power.size() != n)
    throw DimensionError("Mbar, P and k must share the dimension " + std::to_string(n));
  std::vector<double> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (mbar[i].size() != n) throw DimensionError("Mbar must be square");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = mbar[i][j] * power[j];
      if (!std::isfinite(v)) throw ValidationError("Mbar diag(P) has a non-finite entry");
      if (v < 0.0)
        throw ValidationError("Mbar diag(P) has a negative entry at (" + std::to_string(i) + ", " +
                              std::to_string(j) + "); M must be a nonnegative matrix");
      m[i * n + j] = v;
    }
  }
  return Problem(k, NonnegMatrix(n, std::move(m)));
}

/// Source E feeding two CPLs through line resistances r1 (source to node 1)
/// and r2 (node 1 to node 2):
///   k = (E, E),  M = [[r1 P1, r1 P2], [r1 P1, (r1 + r2) P2]].
inline Problem build_two_cpl(double e, double r1, double r2, double p1, double p2) {
  detail::require_positive(e, "E");
  detail::require_positive(r1, "r1");
  detail::require_positive(r2, "r2");
  detail::require_positive(p1, "P1");
  detail::require_positive(p2, "P2");
  return build_general({{r1, r1}, {r1, r1 + r2}}, Vector{p1, p2}, Vector{e, e});
}

/// Physical description of a circuit. When `mbar` and `k` are both set they
/// override the two-CPL ladder built from E, resistances and powers.
struct CircuitSpec {
  double e = 0.0;
  std::vector<double> resistances;
  std::vector<double> powers;
  std::optional<std::vector<std::vector<double>>> mbar;
  std::optional<Vector> k;

  Problem to_problem() const {
    if (powers.empty()) throw ValidationError("P must list at least one load power");
    if (mbar || k) {
      if (!mbar || !k) throw ValidationError("Mbar and k must be given together");
      return build_general(*mbar, Vector(powers), *k);
    }
    if (resistances.size() != 2) throw ValidationError("r must list exactly two resistances");
    if (powers.size() != 2) throw ValidationError("P must list exactly two powers");
    return build_two_cpl(e, resistances[0], resistances[1], powers[0], powers[1]);
  }
};

}  // namespace isotone
