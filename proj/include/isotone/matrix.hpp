#pragma once

// Structure analysis of nonnegative square matrices: reducibility,
// irreducible normal form, Perron root.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "isotone/errors.hpp"
#include "isotone/vector.hpp"

namespace isotone {

/// Square matrix with finite, nonnegative entries. Row-major storage.
class NonnegMatrix {
public:
  NonnegMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : NonnegMatrix(std::vector<std::vector<double>>(rows.begin(), rows.end())) {}

  explicit NonnegMatrix(const std::vector<std::vector<double>>& rows) : n_(rows.size()) {
    if (n_ == 0) throw DimensionError("matrix must have at least one row");
    entries_.reserve(n_ * n_);
    for (const auto& row : rows) {
      if (row.size() != n_)
        throw DimensionError("matrix must be square: row of length " + std::to_string(row.size()) +
                             " in a " + std::to_string(n_) + "-row matrix");
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
    validate();
  }

  NonnegMatrix(std::size_t n, std::vector<double> row_major) : n_(n), entries_(std::move(row_major)) {
    if (n_ == 0) throw DimensionError("matrix must have at least one row");
    if (entries_.size() != n_ * n_) throw DimensionError("row-major data does not match n*n");
    validate();
  }

  static NonnegMatrix zero(std::size_t n) { return NonnegMatrix(n, std::vector<double>(n * n, 0.0)); }

  static NonnegMatrix identity(std::size_t n) {
    std::vector<double> e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
    return NonnegMatrix(n, std::move(e));
  }

  /// Diagonal matrix diag(d).
  static NonnegMatrix diagonal(const Vector& d) {
    const std::size_t n = d.size();
    std::vector<double> e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = d[i];
    return NonnegMatrix(n, std::move(e));
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  std::span<const double> row_major() const noexcept { return entries_; }

  /// Returns M * v.
  Vector multiply(const Vector& v) const {
    if (v.size() != n_) throw DimensionError("matrix-vector dimension mismatch");
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += entries_[i * n_ + j] * v[j];
      out[i] = s;
    }
    return Vector(std::move(out));
  }

  /// Returns M * diag(d); d must be nonnegative.
  NonnegMatrix scale_columns(const Vector& d) const {
    if (d.size() != n_) throw DimensionError("column scaling dimension mismatch");
    std::vector<double> e = entries_;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) e[i * n_ + j] *= d[j];
    return NonnegMatrix(n_, std::move(e));
  }

  /// Principal-style submatrix with the given row and column index lists.
  NonnegMatrix submatrix(std::span<const std::size_t> idx) const {
    const std::size_t m = idx.size();
    std::vector<double> e(m * m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) e[a * m + b] = (*this)(idx[a], idx[b]);
    return NonnegMatrix(m, std::move(e));
  }

  bool has_positive_diagonal() const {
    for (std::size_t i = 0; i < n_; ++i)
      if (!((*this)(i, i) > 0.0)) return false;
    return true;
  }

  friend bool operator==(const NonnegMatrix&, const NonnegMatrix&) = default;

private:
  void validate() const {
    for (double x : entries_) {
      if (!std::isfinite(x)) throw ValidationError("matrix entries must be finite");
      if (x < 0.0) throw ValidationError("matrix entries must be nonnegative");
    }
  }

  std::size_t n_;
  std::vector<double> entries_;
};

/// Permutation matrix P stored as an index map: column i of P is e_{perm[i]},
/// so (P^T v)_i = v_{perm[i]} and (P^T M P)_{ij} = M_{perm[i], perm[j]}.
class Permutation {
public:
  explicit Permutation(std::vector<std::size_t> perm) : perm_(std::move(perm)) {
    std::vector<bool> seen(perm_.size(), false);
    for (std::size_t p : perm_) {
      if (p >= perm_.size() || seen[p]) throw ValidationError("index map is not a bijection");
      seen[p] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return Permutation(std::move(p));
  }

  std::size_t size() const noexcept { return perm_.size(); }
  std::size_t operator[](std::size_t i) const { return perm_[i]; }
  std::span<const std::size_t> indices() const noexcept { return perm_; }
  bool is_identity() const {
    for (std::size_t i = 0; i < perm_.size(); ++i)
      if (perm_[i] != i) return false;
    return true;
  }

  /// The permutation whose matrix is P^T.
  Permutation inverse() const {
    std::vector<std::size_t> inv(perm_.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) inv[perm_[i]] = i;
    return Permutation(std::move(inv));
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

private:
  std::vector<std::size_t> perm_;
};

/// P^T M P
inline NonnegMatrix apply_permutation(const Permutation& p, const NonnegMatrix& m) {
  if (p.size() != m.size()) throw DimensionError("permutation/matrix dimension mismatch");
  return m.submatrix(p.indices());
}

/// P^T v
inline Vector apply_permutation_vec(const Permutation& p, const Vector& v) {
  if (p.size() != v.size()) throw DimensionError("permutation/vector dimension mismatch");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[p[i]];
  return Vector(std::move(out));
}

/// P v (undoes apply_permutation_vec).
inline Vector unapply_permutation_vec(const Permutation& p, const Vector& v) {
  return apply_permutation_vec(p.inverse(), v);
}

/// True iff every row has at least one positive entry.
inline bool row_all_positive(const NonnegMatrix& m) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < n && !any; ++j) any = m(i, j) > 0.0;
    if (!any) return false;
  }
  return true;
}

namespace detail {

/// Strongly connected components of the digraph with edge i -> j iff
/// m(i, j) != 0 (Tarjan). Returns the component id of each vertex; ids are
/// assigned in the order Tarjan completes components, i.e. sinks first.
inline std::vector<std::size_t> strong_components(const NonnegMatrix& m, std::size_t& count) {
  const std::size_t n = m.size();
  constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t next_index = 0;
  count = 0;

  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = next_index++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w = 0; w < n; ++w) {
      if (m(v, w) == 0.0) continue;
      if (index[w] == unvisited) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = count;
      } while (w != v);
      ++count;
    }
  };

  for (std::size_t v = 0; v < n; ++v)
    if (index[v] == unvisited) visit(v);
  return comp;
}

}  // namespace detail

/// Irreducible-digraph test; every 1x1 matrix is irreducible.
inline bool is_irreducible(const NonnegMatrix& m) {
  if (m.size() == 1) return true;
  std::size_t count = 0;
  detail::strong_components(m, count);
  return count == 1;
}

/// P^T M P in block upper triangular form with irreducible diagonal blocks.
struct NormalFormDecomposition {
  Permutation permutation;
  std::vector<std::size_t> block_sizes;
  NonnegMatrix permuted;  // P^T M P

  std::size_t block_count() const noexcept { return block_sizes.size(); }

  /// Offset of block b inside the permuted index range.
  std::size_t block_start(std::size_t b) const {
    return std::accumulate(block_sizes.begin(), block_sizes.begin() + static_cast<std::ptrdiff_t>(b),
                           std::size_t{0});
  }

  /// Diagonal block b of the permuted matrix.
  NonnegMatrix diagonal_block(std::size_t b) const {
    std::vector<std::size_t> idx(block_sizes[b]);
    std::iota(idx.begin(), idx.end(), block_start(b));
    return permuted.submatrix(idx);
  }
};

/// Irreducible normal form. Diagonal blocks are the strongly connected
/// components, placed so that every edge between components points from an
/// earlier block to a later one. Among admissible orders, the component with
/// the smallest original index goes first; indices inside a block are kept
/// ascending. An irreducible input yields the identity with a single block.
inline NormalFormDecomposition normal_form(const NonnegMatrix& m) {
  const std::size_t n = m.size();
  std::size_t count = 0;
  const auto comp = detail::strong_components(m, count);

  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t v = 0; v < n; ++v) members[comp[v]].push_back(v);

  // Condensation edges and in-degrees.
  std::vector<std::vector<bool>> edge(count, std::vector<bool>(count, false));
  std::vector<std::size_t> indegree(count, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (m(i, j) != 0.0 && comp[i] != comp[j] && !edge[comp[i]][comp[j]]) {
        edge[comp[i]][comp[j]] = true;
        ++indegree[comp[j]];
      }

  // Kahn's algorithm, picking the ready component with the smallest member.
  std::vector<bool> placed(count, false);
  std::vector<std::size_t> perm;
  std::vector<std::size_t> sizes;
  perm.reserve(n);
  for (std::size_t step = 0; step < count; ++step) {
    std::size_t best = count;
    for (std::size_t c = 0; c < count; ++c)
      if (!placed[c] && indegree[c] == 0 && (best == count || members[c].front() < members[best].front()))
        best = c;
    placed[best] = true;
    for (std::size_t c = 0; c < count; ++c)
      if (edge[best][c]) --indegree[c];
    perm.insert(perm.end(), members[best].begin(), members[best].end());
    sizes.push_back(members[best].size());
  }

  Permutation p(std::move(perm));
  NonnegMatrix permuted = apply_permutation(p, m);
  return {std::move(p), std::move(sizes), std::move(permuted)};
}

inline constexpr double kSpectralTolerance = 1e-10;
inline constexpr std::size_t kSpectralBudget = 100000;

namespace detail {

/// Perron root of an irreducible block via power iteration on B + I, stopped
/// by the Collatz-Wielandt bracket.
inline double irreducible_perron_root(const NonnegMatrix& b, double tol, std::size_t budget) {
  const std::size_t n = b.size();
  if (n == 1) return std::abs(b(0, 0));

  std::vector<double> v(n, 1.0), w(n);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < budget; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = v[i];
      for (std::size_t j = 0; j < n; ++j) s += b(i, j) * v[j];
      w[i] = s;
    }
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ratio = w[i] / v[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      scale = std::max(scale, w[i]);
    }
    // The bracket cannot shrink below a few ulps of the root.
    const double floor = 8.0 * std::numeric_limits<double>::epsilon() * hi;
    if (hi - lo <= std::max(tol, floor)) return 0.5 * (lo + hi) - 1.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / scale;
  }
  throw BudgetExhaustedError("power iteration budget exhausted; Perron root of shifted block in [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "]",
                             lo - 1.0, hi - 1.0);
}

}  // namespace detail

/// Spectral radius of a nonnegative matrix with absolute error <= tol: the
/// largest Perron root over the diagonal blocks of the normal form.
/// Throws BudgetExhaustedError carrying the last bracket.
inline double spectral_radius(const NonnegMatrix& m, double tol = kSpectralTolerance,
                              std::size_t budget = kSpectralBudget) {
  if (!(tol > 0.0)) throw ValidationError("spectral radius tolerance must be > 0");
  const auto nf = normal_form(m);
  double rho = 0.0;
  for (std::size_t b = 0; b < nf.block_count(); ++b)
    rho = std::max(rho, detail::irreducible_perron_root(nf.diagonal_block(b), tol, budget));
  return rho;
}

}  // namespace isotone
