#pragma once

// Existence, computation and certification of the dominant positive fixed
// point of T_{k,M}, plus small-dimension enumeration and basin probing.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "isotone/errors.hpp"
#include "isotone/iteration.hpp"
#include "isotone/matrix.hpp"
#include "isotone/newton.hpp"
#include "isotone/vector.hpp"

namespace isotone {

// ---------------------------------------------------------------------------
// Bounds

/// Discriminants and the order box that must contain every fixed point.
struct Bounds {
  Vector delta;                 // k_i^2 - 4 M_ii
  std::optional<Vector> y_min;  // (k - sqrt(delta)) / 2, set when necessary_ok
  std::optional<Vector> y_max;  // (k + sqrt(delta)) / 2, set when necessary_ok
  bool necessary_ok = false;    // k > 0 and delta >= 0
};

inline Bounds bounds(const Problem& p) {
  const std::size_t n = p.size();
  const auto& k = p.k();
  std::vector<double> delta(n), lo(n), hi(n);
  bool ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    delta[i] = k[i] * k[i] - 4.0 * p.matrix()(i, i);
    ok = ok && k[i] > 0.0 && delta[i] >= 0.0;
  }
  Bounds b{Vector(delta), std::nullopt, std::nullopt, ok};
  if (ok) {
    for (std::size_t i = 0; i < n; ++i) {
      const double s = std::sqrt(delta[i]);
      lo[i] = 0.5 * (k[i] - s);
      hi[i] = 0.5 * (k[i] + s);
    }
    b.y_min = Vector(std::move(lo));
    b.y_max = Vector(std::move(hi));
  }
  return b;
}

// ---------------------------------------------------------------------------
// Existence

enum class Outcome { Exists, NotExists, Indeterminate };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Exists: return "Exists";
    case Outcome::NotExists: return "NotExists";
    case Outcome::Indeterminate: return "Indeterminate";
  }
  return "?";
}

struct ExistenceVerdict {
  Outcome outcome = Outcome::Indeterminate;
  Bounds bounds;
  /// Exists: the dominant fixed point, Newton-polished.
  std::optional<PositiveVector> dominant;
  /// NotExists: index of the offending iterate, or -1 when the necessary
  /// conditions already fail (the witness is then the discriminant vector).
  std::ptrdiff_t witness_step = -1;
  std::optional<Vector> witness;
  /// The iteration that decided the outcome, when its status is meaningful.
  std::optional<IterationTrace> trace;
};

namespace detail {

inline bool is_diagonal(const NonnegMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

inline ExistenceVerdict exists(Bounds b, PositiveVector limit, const Problem& p,
                               std::optional<IterationTrace> trace) {
  ExistenceVerdict v{.outcome = Outcome::Exists, .bounds = std::move(b)};
  v.dominant = newton_polish(p, limit);
  v.trace = std::move(trace);
  return v;
}

}  // namespace detail

/// Decides whether T_{k,M} has a positive fixed point.
///
/// With a positive diagonal the sequence from y^max is antitone; the first
/// iterate that fails y_r >= y^min proves nonexistence, and convergence to a
/// positive limit proves existence. With some M_ii = 0 the sequence starts
/// just above k instead and a domain exit proves nonexistence. A diagonal M
/// decouples into scalar quadratics whose largest roots form y^max. Running
/// out of budget yields Indeterminate.
inline ExistenceVerdict decide_existence(const Problem& p, const IterationOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw ValidationError("tolerance must be > 0");
  Bounds b = bounds(p);
  if (!b.necessary_ok) {
    ExistenceVerdict v{.outcome = Outcome::NotExists, .bounds = b};
    v.witness_step = -1;
    v.witness = b.delta;
    return v;
  }
  const auto& m = p.matrix();
  if (detail::is_diagonal(m)) {
    PositiveVector top(*b.y_max);
    ExistenceVerdict v{.outcome = Outcome::Exists, .bounds = std::move(b)};
    v.dominant = std::move(top);
    return v;
  }

  if (m.has_positive_diagonal()) {
    const Vector& y_min = *b.y_min;
    PositiveVector start(*b.y_max);
    detail::TraceRecorder rec(start, opts.store_cap);
    for (std::size_t r = 1; r <= opts.budget; ++r) {
      auto next = detail::apply_raw(p, rec.last().values());
      if (detail::classify_step(next) == detail::StepKind::NonFinite) {
        ExistenceVerdict v{.outcome = Outcome::NotExists, .bounds = std::move(b)};
        v.witness_step = static_cast<std::ptrdiff_t>(r);
        v.witness = rec.last();  // unrepresentable; report its predecessor
        return v;
      }
      Vector y(std::move(next));
      if (!leq(y_min, y)) {
        ExistenceVerdict v{.outcome = Outcome::NotExists, .bounds = std::move(b)};
        v.witness_step = static_cast<std::ptrdiff_t>(r);
        v.witness = y;
        return v;
      }
      if (rec.push(r, y) < opts.tol) {
        auto trace = rec.finish(TraceStatus::Converged, r);
        return detail::exists(std::move(b), PositiveVector(y), p, std::move(trace));
      }
    }
    ExistenceVerdict v{.outcome = Outcome::Indeterminate, .bounds = std::move(b)};
    v.trace = rec.finish(TraceStatus::BudgetExhausted, opts.budget);
    return v;
  }

  // Some diagonal entry vanishes: start slightly above k.
  PositiveVector start((1.0 + 1e-9) * p.k());
  auto trace = iterate(p, start, opts);
  switch (trace.status) {
    case TraceStatus::Converged: {
      PositiveVector limit(*trace.limit);
      return detail::exists(std::move(b), std::move(limit), p, std::move(trace));
    }
    case TraceStatus::DomainExit: {
      ExistenceVerdict v{.outcome = Outcome::NotExists, .bounds = std::move(b)};
      v.witness_step = static_cast<std::ptrdiff_t>(trace.exit_step);
      v.witness = trace.last();  // predecessor when the exit iterate overflowed
      v.trace = std::move(trace);
      return v;
    }
    case TraceStatus::BudgetExhausted:
      break;
  }
  ExistenceVerdict v{.outcome = Outcome::Indeterminate, .bounds = std::move(b)};
  v.trace = std::move(trace);
  return v;
}

// ---------------------------------------------------------------------------
// Dominant fixed point and its stability certificate

enum class Stability { AsymptoticallyStable, Marginal, Violation };

inline std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::AsymptoticallyStable: return "AsymptoticallyStable";
    case Stability::Marginal: return "Marginal";
    case Stability::Violation: return "Violation";
  }
  return "?";
}

inline constexpr double kMarginalTolerance = 1e-8;

/// rho(M diag(1/(y o y))) at the dominant point; this matrix is the Jacobian
/// of T there.
struct StabilityCertificate {
  double rho = 0.0;
  Stability classification = Stability::AsymptoticallyStable;
};

/// M diag(1/(a o b)).
inline NonnegMatrix scaled_matrix(const NonnegMatrix& m, const PositiveVector& a, const PositiveVector& b) {
  return m.scale_columns(reciprocal(hadamard(a, b)));
}

inline StabilityCertificate certify(const Problem& p, const PositiveVector& dominant,
                                    double marginal_tol = kMarginalTolerance) {
  const double rho = spectral_radius(scaled_matrix(p.matrix(), dominant, dominant), 1e-12);
  Stability c = Stability::AsymptoticallyStable;
  if (std::abs(rho - 1.0) <= marginal_tol)
    c = Stability::Marginal;
  else if (rho > 1.0)
    c = Stability::Violation;
  return {rho, c};
}

struct DominantFixedPoint {
  PositiveVector point;
  StabilityCertificate certificate;
};

namespace detail {

inline std::string describe_nonexistence(const ExistenceVerdict& v) {
  std::string msg = "no positive fixed point";
  if (v.witness_step < 0) return msg + ": necessary conditions k > 0, delta >= 0 fail";
  msg += ": iterate " + std::to_string(v.witness_step) + " leaves the admissible region";
  return msg;
}

}  // namespace detail

/// The dominant fixed point y□ (componentwise supremum of all fixed points)
/// together with its stability certificate. Throws NonexistenceError when
/// there is no fixed point and BudgetExhaustedError when undecided.
inline DominantFixedPoint dominant_fixed_point(const Problem& p, const IterationOptions& opts = {}) {
  auto v = decide_existence(p, opts);
  switch (v.outcome) {
    case Outcome::NotExists:
      throw NonexistenceError(detail::describe_nonexistence(v));
    case Outcome::Indeterminate: {
      const auto& last = v.trace->last();
      throw BudgetExhaustedError("existence undecided after " + std::to_string(v.trace->iterations) +
                                     " iterations",
                                 *std::min_element(last.begin(), last.end()),
                                 *std::max_element(last.begin(), last.end()));
    }
    case Outcome::Exists:
      break;
  }
  PositiveVector y = std::move(*v.dominant);
  auto cert = certify(p, y);
  return {std::move(y), cert};
}

/// True iff `top` >= every listed point up to `slack` per component.
inline bool dominates_all(const Vector& top, std::span<const PositiveVector> points, double slack = 0.0) {
  for (const auto& q : points)
    for (std::size_t i = 0; i < top.size(); ++i)
      if (q[i] > top[i] + slack) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Spectral relations between fixed points

struct PairRelation {
  std::size_t first = 0, second = 0;
  double rho = 0.0;               // rho(M diag(1/(y o y')))
  bool strictly_comparable = false;
};

struct SelfRelation {
  std::size_t index = 0;
  double rho = 0.0;  // rho(M diag(1/(y o y)))
  bool dominant = false;
};

struct SpectralRelations {
  std::optional<std::size_t> dominant_index;
  bool irreducible = false;
  std::vector<PairRelation> pairs;
  std::vector<SelfRelation> selves;
  /// Human-readable description of every relation that failed.
  std::vector<std::string> violations;

  bool holds() const noexcept { return violations.empty(); }
};

/// Evaluates the spectral-radius relations that must hold among distinct
/// fixed points:
///   rho(y, y') >= 1 for every pair, with equality when y < y';
///   rho(y, y) >= 1 for every non-dominant y;
///   for irreducible M (n > 1) with at least two points, rho(y□, y□) < 1 and
///   rho(y, y) > 1 for non-dominant y.
/// Throws ValidationError when a supplied point has residual >= tol.
inline SpectralRelations spectral_relations(const Problem& p, const std::vector<PositiveVector>& points,
                                            double tol, const IterationOptions& opts = {}) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    detail::require_dim(p, points[i].size());
    const double r = residual(p, points[i]);
    if (!(r < tol))
      throw ValidationError("point " + std::to_string(i) + " is not a fixed point (residual " +
                            std::to_string(r) + ")");
  }
  SpectralRelations out;
  const auto& m = p.matrix();
  out.irreducible = p.size() > 1 && is_irreducible(m);
  if (points.empty()) return out;

  const auto top = dominant_fixed_point(p, opts).point;
  const double match = std::max(1e3 * tol, 1e-9) * (1.0 + sup_norm(top));
  for (std::size_t i = 0; i < points.size(); ++i)
    if (sup_distance(points[i], top) <= match) out.dominant_index = i;

  const double rho_tol = std::min(1e-3 * tol, 1e-12);
  auto rho_of = [&](const PositiveVector& a, const PositiveVector& b) {
    return spectral_radius(scaled_matrix(m, a, b), rho_tol);
  };
  auto fail = [&](std::string s) { out.violations.push_back(std::move(s)); };

  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      PairRelation rel{i, j, rho_of(points[i], points[j]),
                       lt_strict(points[i], points[j]) || lt_strict(points[j], points[i])};
      if (rel.rho < 1.0 - tol)
        fail("pair (" + std::to_string(i) + "," + std::to_string(j) + "): rho " + std::to_string(rel.rho) +
             " < 1");
      if (rel.strictly_comparable && std::abs(rel.rho - 1.0) > tol)
        fail("pair (" + std::to_string(i) + "," + std::to_string(j) + ") strictly ordered but rho " +
             std::to_string(rel.rho) + " != 1");
      out.pairs.push_back(rel);
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    SelfRelation s{i, rho_of(points[i], points[i]), out.dominant_index == i};
    if (!s.dominant && s.rho < 1.0 - tol)
      fail("point " + std::to_string(i) + " is not dominant but rho " + std::to_string(s.rho) + " < 1");
    if (out.irreducible && points.size() >= 2) {
      if (s.dominant && !(s.rho < 1.0))
        fail("dominant point has rho " + std::to_string(s.rho) + " >= 1");
      if (!s.dominant && !(s.rho > 1.0))
        fail("non-dominant point " + std::to_string(i) + " has rho " + std::to_string(s.rho) + " <= 1");
    }
    out.selves.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reducible cascade

/// Dominant fixed point through the irreducible normal form: diagonal blocks
/// are solved from the last to the first, each with its offset reduced by the
/// already solved later blocks. Throws NonexistenceError naming the first
/// block without a fixed point.
inline PositiveVector solve_reducible(const Problem& p, const IterationOptions& opts = {}) {
  const auto nf = normal_form(p.matrix());
  const Vector k = apply_permutation_vec(nf.permutation, p.k());
  const auto& b = nf.permuted;
  const std::size_t n = p.size();
  std::vector<double> y(n, 0.0);

  for (std::size_t blk = nf.block_count(); blk-- > 0;) {
    const std::size_t start = nf.block_start(blk);
    const std::size_t size = nf.block_sizes[blk];
    const std::size_t tail = start + size;
    std::vector<double> kb(size);
    for (std::size_t a = 0; a < size; ++a) {
      double s = 0.0;
      for (std::size_t j = tail; j < n; ++j) s += b(start + a, j) * (1.0 / y[j]);
      kb[a] = k[start + a] - s;
    }
    Problem block(Vector(std::move(kb)), nf.diagonal_block(blk));
    try {
      const auto sol = dominant_fixed_point(block, opts).point;
      for (std::size_t a = 0; a < size; ++a) y[start + a] = sol[a];
    } catch (const NonexistenceError& e) {
      throw NonexistenceError("block " + std::to_string(blk) + " of the normal form: " + e.what());
    } catch (const BudgetExhaustedError& e) {
      throw BudgetExhaustedError("block " + std::to_string(blk) + " of the normal form: " + e.what(),
                                 e.lower(), e.upper());
    }
  }
  return PositiveVector(unapply_permutation_vec(nf.permutation, Vector(std::move(y))));
}

// ---------------------------------------------------------------------------
// n = 1

/// Positive fixed points of y = k - M/y, largest first.
inline std::vector<double> solve_1d(double k, double m) {
  if (!(m >= 0.0) || !std::isfinite(m) || !std::isfinite(k)) throw ValidationError("solve_1d requires finite M >= 0");
  if (m == 0.0) return k > 0.0 ? std::vector<double>{k} : std::vector<double>{};
  const double disc = k * k - 4.0 * m;
  if (k <= 0.0 || disc < 0.0) return {};
  const double top = 0.5 * (k + std::sqrt(disc));
  if (disc == 0.0) return {top};
  // Product of the roots is M; avoids cancellation in (k - sqrt(disc)) / 2.
  return {top, m / top};
}

// ---------------------------------------------------------------------------
// Enumeration (n <= 3)

inline constexpr std::size_t kEnumerateGrid = 64;
inline constexpr std::size_t kEnumerateMaxDim = 3;

/// All positive fixed points found by Newton's method started from the
/// centres of a grid^n lattice over [y^min, y^max]. Roots within 100*tol of
/// each other are merged. Sorted by decreasing first coordinate.
inline std::vector<PositiveVector> enumerate_small(const Problem& p, std::size_t grid = kEnumerateGrid,
                                                   double tol = kDefaultTolerance) {
  const std::size_t n = p.size();
  if (n > kEnumerateMaxDim)
    throw UnsupportedSizeError("enumeration supports n <= 3, got n = " + std::to_string(n));
  if (grid < 16) throw ValidationError("enumeration grid must be >= 16");
  if (!(tol > 0.0)) throw ValidationError("tolerance must be > 0");

  const auto b = bounds(p);
  std::vector<std::vector<double>> roots;
  if (!b.necessary_ok) return {};
  const Vector& lo = *b.y_min;
  const Vector& hi = *b.y_max;

  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= grid;
  std::vector<double> y(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = (static_cast<double>(rest % grid) + 0.5) / static_cast<double>(grid);
      rest /= grid;
      y[i] = lo[i] + t * (hi[i] - lo[i]);
    }
    const double res = detail::newton_run(p, y, 1e-3 * tol, 100);
    if (!(res < tol)) continue;
    const bool seen = std::any_of(roots.begin(), roots.end(), [&](const std::vector<double>& r) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(r[i] - y[i]));
      return d <= 100.0 * tol;
    });
    if (!seen) roots.push_back(y);
  }
  std::sort(roots.begin(), roots.end(), std::greater<>{});
  std::vector<PositiveVector> out;
  out.reserve(roots.size());
  for (auto& r : roots) out.emplace_back(Vector(std::move(r)));
  return out;
}

// ---------------------------------------------------------------------------
// Basin probing

enum class BasinClass { ConvergesToDominant, ConvergesToOther, Exits, Undecided };

inline std::string_view to_string(BasinClass c) {
  switch (c) {
    case BasinClass::ConvergesToDominant: return "ConvergesToDominant";
    case BasinClass::ConvergesToOther: return "ConvergesToOther";
    case BasinClass::Exits: return "Exits";
    case BasinClass::Undecided: return "Undecided";
  }
  return "?";
}

struct BasinResult {
  BasinClass classification = BasinClass::Undecided;
  std::optional<Vector> limit;
  std::size_t iterations = 0;
};

/// Relative sup-norm radius within which a limit is identified with y□.
inline constexpr double kBasinMatchRadius = 1e-6;

/// Classifies where the iteration from y0 ends up. `dominant` is y□ when
/// known (std::nullopt when the problem has no fixed point).
inline BasinResult basin_probe(const Problem& p, const PositiveVector& y0, const std::optional<Vector>& dominant,
                               const IterationOptions& opts = {}) {
  IterationOptions light = opts;
  light.store_cap = 2;
  const auto t = iterate(p, y0, light);
  BasinResult r;
  r.iterations = t.iterations;
  switch (t.status) {
    case TraceStatus::DomainExit:
      r.classification = BasinClass::Exits;
      break;
    case TraceStatus::BudgetExhausted:
      r.classification = BasinClass::Undecided;
      break;
    case TraceStatus::Converged:
      r.limit = t.limit;
      r.classification = dominant && sup_distance(*t.limit, *dominant) <= kBasinMatchRadius * (1.0 + sup_norm(*dominant))
                             ? BasinClass::ConvergesToDominant
                             : BasinClass::ConvergesToOther;
      break;
  }
  return r;
}

/// basin_probe with y□ looked up first.
inline BasinResult basin_probe(const Problem& p, const PositiveVector& y0, const IterationOptions& opts = {}) {
  const auto v = decide_existence(p, opts);
  std::optional<Vector> top;
  if (v.outcome == Outcome::Exists) top = v.dominant->vector();
  return basin_probe(p, y0, top, opts);
}

struct BasinSample {
  PositiveVector start;
  BasinResult result;
};

/// Probes a grid x grid lattice over the box [lower, upper] (n = 2, corners
/// included). Samples are ordered by index ix * grid + iy where ix runs over
/// the first coordinate. Work is split across `threads` workers; the result
/// does not depend on the split.
inline std::vector<BasinSample> basin_grid(const Problem& p, const PositiveVector& lower, const PositiveVector& upper,
                                           std::size_t grid, const IterationOptions& opts = {},
                                           unsigned threads = 0) {
  if (p.size() != 2) throw UnsupportedSizeError("basin grids require n = 2, got n = " + std::to_string(p.size()));
  if (lower.size() != 2 || upper.size() != 2) throw DimensionError("basin box corners must have 2 components");
  if (!lt_strict(lower, upper)) throw ValidationError("basin box requires lower < upper");
  if (grid < 2) throw ValidationError("basin grid must be >= 2");

  const auto v = decide_existence(p, opts);
  std::optional<Vector> top;
  if (v.outcome == Outcome::Exists) top = v.dominant->vector();

  auto coord = [&](std::size_t axis, std::size_t i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid - 1);
    return i + 1 == grid ? upper[axis] : lower[axis] + t * (upper[axis] - lower[axis]);
  };
  const std::size_t total = grid * grid;
  std::vector<std::optional<BasinSample>> slots(total);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      PositiveVector y0{coord(0, idx / grid), coord(1, idx % grid)};
      auto res = basin_probe(p, y0, top, opts);
      slots[idx].emplace(BasinSample{std::move(y0), std::move(res)});
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  if (threads <= 1) {
    work(0, total);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (std::size_t begin = 0; begin < total; begin += chunk)
      pool.emplace_back(work, begin, std::min(total, begin + chunk));
  }
  std::vector<BasinSample> out;
  out.reserve(total);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace isotone
