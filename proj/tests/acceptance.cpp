// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "generators.hpp"
#include "isotone/io.hpp"
#include "oracles.hpp"

using namespace isotone;

namespace {

struct Result {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string vec(const Vector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt("%.6f", v[i]);
  return s + ")";
}

bool within(const Vector& a, const Vector& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(std::abs(a[i] - b[i]) <= tol)) return false;
  return true;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Problem with a fixed point at y: k = y + M (1/y).
Problem through(const PositiveVector& y, const NonnegMatrix& m) {
  return Problem(y.vector() + m.multiply(reciprocal(y)), m);
}

Result ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = io::analyze(build_two_cpl(24, 0.04, 0.06, 500, 450));
  const double secs = elapsed_s(t0);
  std::vector<std::string> bad;
  if (!(r.delta == Vector{496, 396})) bad.push_back("delta " + vec(r.delta));
  if (!r.y_min || !within(*r.y_min, Vector{0.86, 2.05}, 0.005)) bad.push_back("y_min " + (r.y_min ? vec(*r.y_min) : "-"));
  if (!r.y_max || !within(*r.y_max, Vector{23.13, 21.94}, 0.005)) bad.push_back("y_max " + (r.y_max ? vec(*r.y_max) : "-"));
  if (!r.dominant || !within(*r.dominant, Vector{22.94, 20.95}, 0.01))
    bad.push_back("dominant " + (r.dominant ? vec(*r.dominant) : "-") + " expected (22.94, 20.95)");
  bool second = false;
  if (r.enumeration)
    for (const auto& pt : r.enumeration->points) second = second || within(pt.y, Vector{14.45, 2.20}, 0.01);
  if (!second) bad.push_back("second solution (14.45, 2.20) not enumerated");
  if (!(secs < 1.0)) bad.push_back(fmt("runtime %.3f s", secs));
  std::string d = fmt("runtime %.3f s; ", secs);
  if (bad.empty()) return {true, d + "dominant " + vec(*r.dominant)};
  for (const auto& b : bad) d += b + "; ";
  return {false, d};
}

Result ac2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = io::analyze(build_two_cpl(24, 0.04, 0.06, 3000, 1000));
  const double secs = elapsed_s(t0);
  std::vector<std::string> bad;
  if (r.delta[0] != 96.0) bad.push_back(fmt("delta_1 %.17g", r.delta[0]));
  if (!r.y_min || !within(*r.y_min, Vector{7.10, 5.36}, 0.01)) bad.push_back("y_min");
  if (!r.y_max || !within(*r.y_max, Vector{16.89, 18.63}, 0.01)) bad.push_back("y_max");
  if (r.outcome != Outcome::NotExists) bad.push_back("outcome " + std::string(to_string(r.outcome)));
  if (r.witness_step != 3) bad.push_back(fmt("witness step %td", r.witness_step));
  if (!r.witness || !within(*r.witness, Vector{8.76, 0.42}, 0.01)) bad.push_back("witness");
  if (!(secs < 1.0)) bad.push_back(fmt("runtime %.3f s", secs));
  std::string d = fmt("runtime %.3f s; delta %s; witness %s at step %td", secs, vec(r.delta).c_str(),
                      r.witness ? vec(*r.witness).c_str() : "-", r.witness_step);
  for (const auto& b : bad) d += "; " + b;
  return {bad.empty(), d};
}

Result ac3() {
  gen::Rng rng(301);
  int mismatches = 0, exists = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double k = gen::uniform(rng, 0.1, 20), m = gen::uniform(rng, 1e-3, 120);
    const auto roots = solve_1d(k, m);
    const auto v = decide_existence(Problem(Vector{k}, NonnegMatrix{{m}}));
    const bool expect = k >= 2.0 * std::sqrt(m);
    if ((v.outcome == Outcome::Exists) != expect || roots.empty() == expect) ++mismatches;
    if (!expect) continue;
    ++exists;
    const long double disc = (long double)k * k - 4.0L * m;
    const long double hi = (k + std::sqrt(disc)) / 2.0L, lo = (k - std::sqrt(disc)) / 2.0L;
    if (std::abs(roots.front() - (double)hi) > 1e-10 || std::abs(roots.back() - (double)lo) > 1e-10 ||
        std::abs((*v.dominant)[0] - (double)hi) > 1e-10)
      ++mismatches;
  }
  return {mismatches == 0, fmt("1000 instances (%d solvable), %d mismatches", exists, mismatches)};
}

Result ac4() {
  const Problem p = build_two_cpl(24, 0.04, 0.06, 500, 450);
  const auto pts = enumerate_small(p);
  if (pts.size() != 2) return {false, fmt("expected 2 fixed points, found %zu", pts.size())};
  const auto& top = pts[0];
  const auto& low = pts[1];
  auto rho = [&](const PositiveVector& a, const PositiveVector& b) {
    return spectral_radius(scaled_matrix(p.matrix(), a, b), 1e-14);
  };
  const double r_top = rho(top, top), r_low = rho(low, low), r_mix = rho(low, top);
  const bool ok = r_top < 1.0 && r_low > 1.0 && std::abs(r_mix - 1.0) <= 1e-8;
  return {ok, fmt("rho(top,top)=%.6f rho(low,low)=%.6f |rho(low,top)-1|=%.2e", r_top, r_low, std::abs(r_mix - 1.0))};
}

Result ac5() {
  gen::Rng rng(501);
  int violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = gen::index(rng, 1, 5);
    const auto p = gen::problem(rng, n, 0.5, 20, 5, gen::uniform(rng, 0, 0.6));
    const auto y = gen::positive(rng, n, 0.1, 25);
    std::vector<double> zv(y.begin(), y.end());
    for (auto& x : zv) x += gen::uniform(rng, 0, 5);
    const PositiveVector z(zv);
    const auto ty = apply_T(p, y), tz = apply_T(p, z);
    if (!leq(ty, tz)) ++violations;
    if (!leq(ty, p.k()) || !leq(tz, p.k())) ++violations;
    const double lam = gen::uniform(rng, 0, 1);
    const auto tm = apply_T(p, PositiveVector(lam * y.vector() + (1 - lam) * z.vector()));
    for (std::size_t i = 0; i < n; ++i)
      if (tm[i] < lam * ty[i] + (1 - lam) * tz[i] - 1e-12 * (1 + std::abs(tm[i]))) ++violations;
    std::vector<double> y0(p.k().begin(), p.k().end());
    for (auto& x : y0) x += gen::uniform(rng, 0, 5);
    if (!is_antitone(iterate(p, PositiveVector(y0), {.budget = 2000}).monotonicity)) ++violations;
  }
  return {violations == 0, fmt("500 problems, %d violations", violations)};
}

Result ac6() {
  gen::Rng rng(601);
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = gen::index(rng, 1, 5);
    const auto m = gen::matrix(rng, n, 2.0, gen::uniform(rng, 0, 0.6));
    const auto p = through(gen::positive(rng, n, 1, 10), m);
    const auto perm = gen::permutation(rng, n);
    const auto a = dominant_fixed_point(p);
    const auto b = dominant_fixed_point(p.permuted(perm));
    const double d = sup_distance(apply_permutation_vec(perm, a.point), b.point);
    const double dr = std::abs(a.certificate.rho - b.certificate.rho);
    worst = std::max({worst, d, dr});
    if (d > 1e-9 || dr > 1e-9) ++violations;
  }
  return {violations == 0, fmt("200 pairs, %d violations, worst deviation %.2e", violations, worst)};
}

/// Random block upper triangular matrix with irreducible diagonal blocks,
/// conjugated by a random permutation.
NonnegMatrix random_reducible(gen::Rng& rng, std::size_t n) {
  std::vector<std::size_t> sizes;
  for (std::size_t left = n; left > 0;) {
    const std::size_t s = gen::index(rng, 1, std::min<std::size_t>(left, 3));
    sizes.push_back(s);
    left -= s;
  }
  if (sizes.size() == 1 && n > 1) sizes = {n - 1, 1};
  std::vector<double> e(n * n, 0.0);
  std::size_t start = 0;
  for (std::size_t s : sizes) {
    for (std::size_t i = start; i < start + s; ++i) {
      for (std::size_t j = start; j < start + s; ++j) e[i * n + j] = gen::uniform(rng, 0.1, 2.0);
      for (std::size_t j = start + s; j < n; ++j)
        if (gen::uniform(rng, 0, 1) < 0.5) e[i * n + j] = gen::uniform(rng, 0.0, 2.0);
    }
    start += s;
  }
  return apply_permutation(gen::permutation(rng, n), NonnegMatrix(n, std::move(e)));
}

Result ac7() {
  gen::Rng rng(701);
  int violations = 0, reducible = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = gen::index(rng, 2, 6);
    const auto m = random_reducible(rng, n);
    if (!is_irreducible(m)) ++reducible;
    const auto p = through(gen::positive(rng, n, 1, 10), m);
    const double d = sup_distance(solve_reducible(p), dominant_fixed_point(p).point);
    worst = std::max(worst, d);
    if (d > 1e-8) ++violations;
  }
  return {violations == 0 && reducible == 100,
          fmt("%d/100 reducible, %d violations, worst deviation %.2e", reducible, violations, worst)};
}

Result ac8() {
  gen::Rng rng(801);
  int violations = 0;
  std::size_t roots = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = gen::positive_matrix(rng, 2, 0.05, 3.0);
    const auto p = through(gen::positive(rng, 2, 0.5, 8), m);
    const auto got = enumerate_small(p);
    const auto want = oracle::fixed_points_2d({p.k()[0], p.k()[1]}, {{{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}});
    roots += want.size();
    bool ok = got.size() == want.size();
    for (const auto& w : want) {
      bool found = false;
      for (const auto& g : got) found = found || (std::abs(g[0] - w[0]) <= 1e-7 && std::abs(g[1] - w[1]) <= 1e-7);
      ok = ok && found;
    }
    if (!ok) ++violations;
  }
  return {violations == 0, fmt("100 instances, %zu oracle roots, %d mismatches", roots, violations)};
}

Result ac9() {
  const Problem p = build_two_cpl(24, 0.04, 0.06, 500, 450);
  const auto pts = enumerate_small(p);
  if (pts.size() != 2) return {false, "expected 2 fixed points"};
  const auto& low = pts[1];
  const auto top = dominant_fixed_point(p).point.vector();
  gen::Rng rng(901);
  int other = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    // Open below at v*, closed above at (50, 50).
    PositiveVector y0{std::nextafter(gen::uniform(rng, low[0], 50.0), 51.0),
                      std::nextafter(gen::uniform(rng, low[1], 50.0), 51.0)};
    if (y0[0] > 50.0 || y0[1] > 50.0) y0 = PositiveVector{50.0, 50.0};
    if (basin_probe(p, y0, top).classification != BasinClass::ConvergesToDominant) ++other;
  }
  return {other == 0, fmt("1000 starts, %d not converging to the dominant point", other)};
}

Result ac10() {
  gen::Rng rng(1001);
  int instances = 0, multi = 0, violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = gen::index(rng, 2, 3);
    // Strong self-loads and weak coupling give up to 2^n fixed points.
    std::vector<double> e(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) e[i * n + j] = i == j ? gen::uniform(rng, 1, 4) : gen::uniform(rng, 1e-3, 0.3);
    const NonnegMatrix m(n, std::move(e));
    if (!is_irreducible(m)) continue;
    ++instances;
    const auto p = through(gen::positive(rng, n, 1, 6), m);
    const auto pts = enumerate_small(p, 24);
    if (pts.size() < 3) continue;
    ++multi;
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = 0; b < pts.size(); ++b)
        for (std::size_t c = 0; c < pts.size(); ++c)
          if (lneq(pts[a], pts[b]) && lneq(pts[b], pts[c])) ++violations;
    for (std::size_t a = 1; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b)
        if (!incomparable(pts[a], pts[b])) ++violations;
  }
  return {violations == 0,
          fmt("%d irreducible instances, %d with >= 3 fixed points, %d violations", instances, multi, violations)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"AC1 case I reproduction", ac1},       {"AC2 case II reproduction", ac2},
      {"AC3 scalar closed form", ac3},        {"AC4 spectral certificate", ac4},
      {"AC5 order properties", ac5},          {"AC6 permutation equivariance", ac6},
      {"AC7 reducible cascade", ac7},         {"AC8 quartic oracle", ac8},
      {"AC9 basin of the dominant point", ac9}, {"AC10 chains and incomparability", ac10},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Result r{false, ""};
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", name, r.detail.c_str());
    failed += !r.pass;
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
