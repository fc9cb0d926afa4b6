#pragma once

// Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for
// eigenvalues, inverse iteration for eigenvectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcigeo/error.hpp"

namespace qcigeo {

struct SymmetricTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  ///< off[i] couples rows i and i+1

  std::size_t size() const noexcept { return diag.size(); }

  double norm_inf() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
      double row = std::abs(diag[i]);
      if (i > 0) row += std::abs(off[i - 1]);
      if (i + 1 < diag.size()) row += std::abs(off[i]);
      m = std::max(m, row);
    }
    return m;
  }

  void multiply(std::span<const double> x, std::span<double> y) const noexcept {
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
      double acc = diag[i] * x[i];
      if (i > 0) acc += off[i - 1] * x[i - 1];
      if (i + 1 < n) acc += off[i] * x[i + 1];
      y[i] = acc;
    }
  }
};

namespace detail {

inline double pivot_floor(const SymmetricTridiagonal& m) {
  double emax = 1.0;
  for (double e : m.off) emax = std::max(emax, e * e);
  return std::numeric_limits<double>::min() * emax;
}

}  // namespace detail

/// Number of eigenvalues strictly below x (LDL^T inertia).
inline std::size_t count_below(const SymmetricTridiagonal& m, double x) {
  const double floor = detail::pivot_floor(m);
  std::size_t count = 0;
  double q = m.diag[0] - x;
  if (std::abs(q) < floor) q = -floor;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < m.size(); ++i) {
    q = m.diag[i] - x - m.off[i - 1] * m.off[i - 1] / q;
    if (std::abs(q) < floor) q = -floor;
    if (q < 0.0) ++count;
  }
  return count;
}

inline std::pair<double, double> gershgorin_bounds(const SymmetricTridiagonal& m) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(m.off[i - 1]);
    if (i + 1 < m.size()) r += std::abs(m.off[i]);
    lo = std::min(lo, m.diag[i] - r);
    hi = std::max(hi, m.diag[i] + r);
  }
  const double pad = 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
  return {lo - pad, hi + pad};
}

/// index-th smallest eigenvalue (0-based) by bisection on the Sturm count.
inline double bisect_eigenvalue(const SymmetricTridiagonal& m, std::size_t index) {
  if (index >= m.size())
    throw Error(ErrorKind::invalid_argument, "eigenvalue index " + std::to_string(index) + " out of range");
  auto [lo, hi] = gershgorin_bounds(m);
  const double floor = detail::pivot_floor(m);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 2200; ++it) {
    const double width = hi - lo;
    if (width <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) || width <= 4.0 * floor) break;
    const double mid = lo + 0.5 * width;
    if (mid <= lo || mid >= hi) break;
    if (count_below(m, mid) > index) hi = mid;
    else lo = mid;
  }
  return lo + 0.5 * (hi - lo);
}

namespace detail {

// LU with partial pivoting of (T - shift I), LAPACK gttrf layout.
struct ShiftedLU {
  std::vector<double> d, du, du2, dl;
  std::vector<char> swapped;

  ShiftedLU(const SymmetricTridiagonal& m, double shift) {
    const std::size_t n = m.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = m.diag[i] - shift;
    du = m.off;
    dl = m.off;
    du.resize(n ? n - 1 : 0);
    dl.resize(n ? n - 1 : 0);
    du2.assign(n > 2 ? n - 2 : 0, 0.0);
    swapped.assign(n ? n - 1 : 0, 0);
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(1.0, m.norm_inf());
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = tiny;
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = 1;
      }
    }
    if (n && d[n - 1] == 0.0) d[n - 1] = tiny;
  }

  void solve(std::span<double> b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl[i] * b[i];
      } else {
        b[i + 1] -= dl[i] * b[i];
      }
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double acc = b[ii];
      if (ii + 1 < n) acc -= du[ii] * b[ii + 1];
      if (ii + 2 < n) acc -= du2[ii] * b[ii + 2];
      b[ii] = acc / d[ii];
    }
  }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void normalize(std::span<double> v) {
  const double n = std::sqrt(dot(v, v));
  for (double& x : v) x /= n;
}

}  // namespace detail

/// Unit eigenvector for an accurate eigenvalue `lambda`, orthogonalised
/// against `against` (vectors of nearby eigenvalues). Throws no_convergence.
inline std::vector<double> inverse_iteration(const SymmetricTridiagonal& m, double lambda,
                                             std::size_t index,
                                             std::span<const std::vector<double>> against = {}) {
  const std::size_t n = m.size();
  const double norm = std::max(m.norm_inf(), std::numeric_limits<double>::min());
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const detail::ShiftedLU lu(m, lambda);

  std::vector<double> x(n);
  // deterministic, non-degenerate start
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.0 + 0.37 * static_cast<double>(i));
  detail::normalize(x);

  std::vector<double> r(n);
  const double target = 1e3 * eps * norm * std::sqrt(static_cast<double>(n));
  for (int it = 0; it < 8; ++it) {
    lu.solve(x);
    for (const auto& v : against) {
      const double c = detail::dot(x, v);
      for (std::size_t i = 0; i < n; ++i) x[i] -= c * v[i];
    }
    detail::normalize(x);
    m.multiply(x, r);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(r[i] - lambda * x[i]));
    if (it >= 1 && res <= target) return x;
  }
  throw Error(ErrorKind::no_convergence,
              "inverse iteration did not converge for eigenpair index " + std::to_string(index));
}

}  // namespace qcigeo
