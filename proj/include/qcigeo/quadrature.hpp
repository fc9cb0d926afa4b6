#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "qcigeo/error.hpp"

namespace qcigeo {

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {
// Returns (P_n(x), P_n'(x)) by the three-term recurrence; n >= 1.
inline std::pair<double, double> legendre_with_derivative(std::size_t n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (std::size_t j = 2; j <= n; ++j) {
    const double jj = static_cast<double>(j);
    const double p2 = ((2.0 * jj - 1.0) * x * p1 - (jj - 1.0) * p0) / jj;
    p0 = p1;
    p1 = p2;
  }
  const double dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}
}  // namespace detail

inline GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "gauss_legendre: n must be positive");
  GaussLegendreRule rule{std::vector<double>(n), std::vector<double>(n)};
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n / 2; ++i) {
    // Tricomi initial guess for the i-th largest root, then Newton.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = detail::legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    const double dp = detail::legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    const double dp = detail::legendre_with_derivative(n, 0.0).second;
    rule.nodes[n / 2] = 0.0;
    rule.weights[n / 2] = 2.0 / (dp * dp);
  }
  return rule;
}

/// Pairwise (tree) summation; the association order depends only on the
/// length of the input, so results are bit-stable for a fixed size.
template <class T>
T pairwise_sum(std::span<const T> values) {
  if (values.empty()) return T{};
  if (values.size() <= 8) {
    T acc = values[0];
    for (std::size_t i = 1; i < values.size(); ++i) acc += values[i];
    return acc;
  }
  const std::size_t mid = values.size() / 2;
  return pairwise_sum(values.first(mid)) + pairwise_sum(values.subspan(mid));
}

/// Composite Gauss-Legendre over `panels` equal panels of [a, b].
template <class F>
double composite_gauss(F&& fn, double a, double b, std::size_t panels,
                       const GaussLegendreRule& rule) {
  std::vector<double> sums(panels);
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double mid = lo + 0.5 * width;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      s += rule.weights[i] * fn(mid + 0.5 * width * rule.nodes[i]);
    sums[p] = 0.5 * width * s;
  }
  return pairwise_sum(std::span<const double>(sums));
}

}  // namespace qcigeo
