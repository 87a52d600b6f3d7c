#pragma once

// Independent reference computations for tests. Nothing here calls into the
// solver's iteration, Newton or power-iteration code.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Dense = std::vector<std::vector<double>>;

/// All complex roots of sum_i c[i] x^i (c.back() != 0), Durand-Kerner.
inline std::vector<cplx> poly_roots(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const std::size_t deg = c.size() - 1;
  if (deg == 0) return {};
  const double lead = c.back();
  for (double& x : c) x /= lead;
  double bound = 0.0;
  for (std::size_t i = 0; i < deg; ++i) bound = std::max(bound, std::abs(c[i]));
  bound += 1.0;
  std::vector<cplx> z(deg);
  for (std::size_t i = 0; i < deg; ++i) z[i] = std::polar(bound, 0.4 + 2.0 * M_PI * double(i) / double(deg));
  auto eval = [&](cplx x) {
    cplx s = 0.0;
    for (std::size_t i = deg + 1; i-- > 0;) s = s * x + c[i];
    return s;
  };
  for (int it = 0; it < 2000; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < deg; ++i) {
      cplx den = 1.0;
      for (std::size_t j = 0; j < deg; ++j)
        if (j != i) den *= z[i] - z[j];
      const cplx step = eval(z[i]) / den;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15 * bound) break;
  }
  // A few Newton steps per root sharpen simple roots.
  for (auto& x : z) {
    for (int it = 0; it < 5; ++it) {
      cplx p = 0.0, dp = 0.0;
      for (std::size_t i = deg + 1; i-- > 0;) {
        dp = dp * x + p;
        p = p * x + c[i];
      }
      if (std::abs(dp) == 0.0) break;
      x -= p / dp;
    }
  }
  return z;
}

/// Characteristic polynomial coefficients (ascending) of a 1x1, 2x2 or 3x3 matrix.
inline std::vector<double> char_poly(const Dense& a) {
  const std::size_t n = a.size();
  if (n == 1) return {-a[0][0], 1.0};
  if (n == 2) {
    const double tr = a[0][0] + a[1][1];
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    return {det, -tr, 1.0};
  }
  const double tr = a[0][0] + a[1][1] + a[2][2];
  const double minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] +
                        a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  return {-det, minors, -tr, 1.0};
}

/// Largest modulus among the characteristic-polynomial roots.
inline double spectral_radius(const Dense& a) {
  double r = 0.0;
  for (auto z : poly_roots(char_poly(a))) r = std::max(r, std::abs(z));
  return r;
}

/// 2x2 spectral radius from trace and determinant.
inline double spectral_radius_2x2(double a, double b, double c, double d) {
  const double tr = a + d, det = a * d - b * c;
  const double disc = tr * tr - 4.0 * det;
  if (disc >= 0.0) return std::max(std::abs(0.5 * (tr + std::sqrt(disc))), std::abs(0.5 * (tr - std::sqrt(disc))));
  return std::sqrt(det);  // complex pair: |lambda|^2 = det
}

/// Positive solutions of y = k - M (1/y) for n = 2 with M(1,0) > 0, by
/// elimination. From the second equation y1 = M10 y2 / D(y2) with
/// D = k2 y2 - y2^2 - M11; substituting into the first and clearing
/// denominators leaves the quartic
///   M10^2 y2^2 - k1 M10 y2 D + M00 D^2 + M01 M10 D = 0.
inline std::vector<std::array<double, 2>> fixed_points_2d(const std::array<double, 2>& k,
                                                          const std::array<std::array<double, 2>, 2>& m) {
  const double k1 = k[0], k2 = k[1];
  const double a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
  // D(y) = -y^2 + k2 y - d  -> coefficients ascending.
  const std::vector<double> dq = {-d, k2, -1.0};
  auto mul = [](const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> r(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
  };
  auto add = [](std::vector<double> p, const std::vector<double>& q, double s) {
    if (p.size() < q.size()) p.resize(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) p[i] += s * q[i];
    return p;
  };
  std::vector<double> poly = {0.0, 0.0, c * c};
  poly = add(poly, mul({0.0, 1.0}, dq), -k1 * c);
  poly = add(poly, mul(dq, dq), a);
  poly = add(poly, dq, b * c);

  std::vector<std::array<double, 2>> out;
  for (auto z : poly_roots(poly)) {
    if (std::abs(z.imag()) > 1e-6 * (1.0 + std::abs(z.real()))) continue;
    const double y2 = z.real();
    if (!(y2 > 0.0)) continue;
    const double dv = k2 * y2 - y2 * y2 - d;
    if (!(dv > 0.0)) continue;
    const double y1 = c * y2 / dv;
    // Verify against the original system to drop spurious roots.
    const double r1 = y1 - (k1 - a / y1 - b / y2);
    const double r2 = y2 - (k2 - c / y1 - d / y2);
    if (std::max(std::abs(r1), std::abs(r2)) > 1e-6 * (1.0 + std::abs(k1) + std::abs(k2))) continue;
    bool dup = false;
    for (const auto& q : out)
      if (std::abs(q[0] - y1) < 1e-9 * (1 + y1) && std::abs(q[1] - y2) < 1e-9 * (1 + y2)) dup = true;
    if (!dup) out.push_back({y1, y2});
  }
  return out;
}

}  // namespace oracle
