#pragma once

// The map T_{k,M}(y) = k - M (1/y) and its fixed-point iteration sequences.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isotone/errors.hpp"
#include "isotone/matrix.hpp"
#include "isotone/vector.hpp"

namespace isotone {

/// An isotone electric system y = k - M (1/y).
class Problem {
public:
  Problem(Vector k, NonnegMatrix m) : k_(std::move(k)), m_(std::move(m)) {
    if (k_.size() != m_.size())
      throw DimensionError("offset has length " + std::to_string(k_.size()) + " but matrix is " +
                           std::to_string(m_.size()) + "x" + std::to_string(m_.size()));
  }

  std::size_t size() const noexcept { return k_.size(); }
  const Vector& k() const noexcept { return k_; }
  const NonnegMatrix& matrix() const noexcept { return m_; }

  /// The problem (P^T k, P^T M P).
  Problem permuted(const Permutation& p) const {
    return Problem(apply_permutation_vec(p, k_), apply_permutation(p, m_));
  }

  friend bool operator==(const Problem&, const Problem&) = default;

private:
  Vector k_;
  NonnegMatrix m_;
};

namespace detail {

inline void require_dim(const Problem& p, std::size_t n) {
  if (p.size() != n)
    throw DimensionError("point has length " + std::to_string(n) + " but problem has dimension " +
                         std::to_string(p.size()));
}

/// k - M (1/y) without the finiteness check of Vector.
inline std::vector<double> apply_raw(const Problem& p, std::span<const double> y) {
  const std::size_t n = p.size();
  const auto& m = p.matrix();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m(i, j) * (1.0 / y[j]);
    out[i] = p.k()[i] - s;
  }
  return out;
}

}  // namespace detail

/// T_{k,M}(y). The result may leave the positive orthant.
inline Vector apply_T(const Problem& p, const PositiveVector& y) {
  detail::require_dim(p, y.size());
  return Vector(detail::apply_raw(p, y.values()));
}

/// max_i |y_i - T(y)_i|
inline double residual(const Problem& p, const PositiveVector& y) {
  return sup_distance(y, apply_T(p, y));
}

enum class TraceStatus { Converged, DomainExit, BudgetExhausted };

enum class Monotonicity { StronglyIsotone, Isotone, StronglyAntitone, Antitone, NonMonotone };

inline std::string_view to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::Converged: return "Converged";
    case TraceStatus::DomainExit: return "DomainExit";
    case TraceStatus::BudgetExhausted: return "BudgetExhausted";
  }
  return "?";
}

inline std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::StronglyIsotone: return "StronglyIsotone";
    case Monotonicity::Isotone: return "Isotone";
    case Monotonicity::StronglyAntitone: return "StronglyAntitone";
    case Monotonicity::Antitone: return "Antitone";
    case Monotonicity::NonMonotone: return "NonMonotone";
  }
  return "?";
}

inline bool is_isotone(Monotonicity m) {
  return m == Monotonicity::StronglyIsotone || m == Monotonicity::Isotone;
}

inline bool is_antitone(Monotonicity m) {
  return m == Monotonicity::StronglyAntitone || m == Monotonicity::Antitone;
}

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr std::size_t kDefaultBudget = 10000;
inline constexpr std::size_t kDefaultStoreCap = 1000;

struct IterationOptions {
  double tol = kDefaultTolerance;
  std::size_t budget = kDefaultBudget;
  /// Iterates with index below the cap are all stored; past it only every
  /// 10th plus the last two.
  std::size_t store_cap = kDefaultStoreCap;
};

/// A recorded fixed-point iteration sequence y_{r+1} = T(y_r).
struct IterationTrace {
  PositiveVector start;
  /// Stored iterates; iterates.front() is the start.
  std::vector<Vector> iterates;
  /// Sequence index r of each stored iterate.
  std::vector<std::size_t> steps;
  /// Sup-norm of y_r - y_{r-1} for each stored iterate (0 for the start).
  std::vector<double> step_sizes;
  TraceStatus status = TraceStatus::BudgetExhausted;
  /// Limit when status == Converged.
  std::optional<Vector> limit;
  /// Index of the offending iterate when status == DomainExit. If that
  /// iterate overflowed to a non-finite value it is not stored.
  std::size_t exit_step = 0;
  Monotonicity monotonicity = Monotonicity::NonMonotone;
  /// Number of applications of T performed.
  std::size_t iterations = 0;

  const Vector& last() const { return iterates.back(); }
};

namespace detail {

/// Builds an IterationTrace step by step: applies the storage policy and
/// tracks monotonicity over every consecutive pair.
class TraceRecorder {
public:
  TraceRecorder(const PositiveVector& start, std::size_t store_cap)
      : trace_{.start = start, .iterates = {start.vector()}, .steps = {0}, .step_sizes = {0.0}}, store_cap_(store_cap), last_{0, start.vector(), 0.0} {}

  /// Records y_r and returns sup |y_r - y_{r-1}|.
  double push(std::size_t r, Vector y) {
    const Vector& prev = last_.y;
    strict_dec_ = strict_dec_ && lt_strict(y, prev);
    dec_ = dec_ && leq(y, prev);
    strict_inc_ = strict_inc_ && lt_strict(prev, y);
    inc_ = inc_ && leq(prev, y);
    const double step = sup_distance(prev, y);
    // Storage lags one step so that finish() can still add the last two
    // iterates in order.
    if (before_last_ && (before_last_->r < store_cap_ || before_last_->r % 10 == 0)) store(*before_last_);
    before_last_ = std::move(last_);
    last_ = Entry{r, std::move(y), step};
    return step;
  }

  const Vector& last() const noexcept { return last_.y; }

  IterationTrace finish(TraceStatus status, std::size_t iterations) {
    if (before_last_) store(*before_last_);
    store(last_);
    trace_.status = status;
    trace_.iterations = iterations;
    trace_.monotonicity = classify();
    if (status == TraceStatus::Converged) trace_.limit = last_.y;
    if (status == TraceStatus::DomainExit) trace_.exit_step = last_.r;
    return std::move(trace_);
  }

  /// Domain exit at step r by an iterate with non-finite entries, which is
  /// not representable and therefore not stored.
  IterationTrace finish_nonfinite_exit(std::size_t r, std::size_t iterations) {
    auto t = finish(TraceStatus::DomainExit, iterations);
    t.exit_step = r;
    return t;
  }

private:
  struct Entry {
    std::size_t r;
    Vector y;
    double step;
  };

  void store(const Entry& e) {
    if (e.r <= trace_.steps.back()) return;
    trace_.iterates.push_back(e.y);
    trace_.steps.push_back(e.r);
    trace_.step_sizes.push_back(e.step);
  }

  Monotonicity classify() const {
    if (strict_dec_) return Monotonicity::StronglyAntitone;
    if (strict_inc_) return Monotonicity::StronglyIsotone;
    if (dec_) return Monotonicity::Antitone;
    if (inc_) return Monotonicity::Isotone;
    return Monotonicity::NonMonotone;
  }

  IterationTrace trace_;
  std::size_t store_cap_;
  Entry last_;
  std::optional<Entry> before_last_;
  bool strict_dec_ = true, dec_ = true, strict_inc_ = true, inc_ = true;
};

/// Classification of a freshly computed iterate.
enum class StepKind { InDomain, NonPositive, NonFinite };

inline StepKind classify_step(std::span<const double> y) {
  bool nonpositive = false;
  for (double x : y) {
    if (!std::isfinite(x)) return StepKind::NonFinite;
    if (!(x > 0.0)) nonpositive = true;
  }
  return nonpositive ? StepKind::NonPositive : StepKind::InDomain;
}

}  // namespace detail

/// Runs y_{r+1} = T(y_r) from y0. Stops with DomainExit at the first iterate
/// with a component <= 0 (or an overflow), with Converged when the sup-norm
/// step drops below tol, and with BudgetExhausted after `budget` steps.
inline IterationTrace iterate(const Problem& p, const PositiveVector& y0, const IterationOptions& opts = {}) {
  detail::require_dim(p, y0.size());
  if (!(opts.tol > 0.0)) throw ValidationError("tolerance must be > 0");
  if (opts.budget < 1) throw ValidationError("budget must be >= 1");

  detail::TraceRecorder rec(y0, opts.store_cap);
  for (std::size_t r = 1; r <= opts.budget; ++r) {
    auto next = detail::apply_raw(p, rec.last().values());
    switch (detail::classify_step(next)) {
      case detail::StepKind::NonFinite:
        return rec.finish_nonfinite_exit(r, r);
      case detail::StepKind::NonPositive:
        rec.push(r, Vector(std::move(next)));
        return rec.finish(TraceStatus::DomainExit, r);
      case detail::StepKind::InDomain:
        if (rec.push(r, Vector(std::move(next))) < opts.tol) return rec.finish(TraceStatus::Converged, r);
        break;
    }
  }
  return rec.finish(TraceStatus::BudgetExhausted, opts.budget);
}

/// Checks y_r <= z_r along the two sequences started at y0 <= z0, for
/// r <= steps while both stay in the positive orthant.
inline bool order_preservation_check(const Problem& p, const PositiveVector& y0, const PositiveVector& z0,
                                     std::size_t steps) {
  detail::require_dim(p, y0.size());
  detail::require_dim(p, z0.size());
  if (!leq(y0, z0)) throw ValidationError("order_preservation_check requires y0 <= z0");
  std::vector<double> y(y0.begin(), y0.end()), z(z0.begin(), z0.end());
  for (std::size_t r = 1; r <= steps; ++r) {
    y = detail::apply_raw(p, y);
    z = detail::apply_raw(p, z);
    if (detail::classify_step(y) != detail::StepKind::InDomain ||
        detail::classify_step(z) != detail::StepKind::InDomain) {
      // Still compare the last pair when it is representable.
      if (detail::classify_step(y) != detail::StepKind::NonFinite &&
          detail::classify_step(z) != detail::StepKind::NonFinite)
        return leq(Vector(y), Vector(z));
      return true;
    }
    if (!leq(Vector(y), Vector(z))) return false;
  }
  return true;
}

}  // namespace isotone
