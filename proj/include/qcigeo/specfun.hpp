#pragma once

// Legendre and fully normalised associated Legendre functions on the sphere.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "qcigeo/error.hpp"

namespace qcigeo {

/// Spherical-harmonic index (degree l, order k) and its semiclassical
/// parameter h = 1 / sqrt(l (l + 1)).
struct HarmonicIndex {
  int l = 0;
  int k = 0;
  double h = std::numeric_limits<double>::infinity();
};

inline HarmonicIndex make_harmonic_index(int l, int k) {
  if (l < 0 || k < 0 || k > l)
    throw Error(ErrorKind::invalid_argument,
                "harmonic index needs 0 <= k <= l (l = " + std::to_string(l) +
                    ", k = " + std::to_string(k) + ")");
  const double ll = static_cast<double>(l);
  const double h = l == 0 ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(ll * (ll + 1.0));
  return {l, k, h};
}

/// P_k(x) by (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}.
inline double legendre_P(int k, double x) {
  if (k < 0) throw Error(ErrorKind::invalid_argument, "legendre_P: negative degree");
  if (!(std::abs(x) <= 1.0)) throw Error(ErrorKind::invalid_argument, "legendre_P: |x| > 1");
  if (k == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int j = 1; j < k; ++j) {
    const double jj = static_cast<double>(j);
    const double p2 = ((2.0 * jj + 1.0) * x * p1 - jj * p0) / (jj + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// P_k(0) = (-1)^{k/2} (k-1)!! / k!! for even k, exactly 0 for odd k.
inline double legendre_P0(int k) {
  if (k < 0) throw Error(ErrorKind::invalid_argument, "legendre_P0: negative degree");
  if (k % 2 == 1) return 0.0;
  const double kk = static_cast<double>(k);
  // (k-1)!!/k!! = k! / (2^k ((k/2)!)^2)
  const double log_mag =
      std::lgamma(kk + 1.0) - kk * std::numbers::ln2 - 2.0 * std::lgamma(0.5 * kk + 1.0);
  const double mag = std::exp(log_mag);
  return (k / 2) % 2 == 0 ? mag : -mag;
}

/// Fully normalised associated Legendre function N_l^k(x): Y = N_l^k(cos theta)
/// e^{ik phi} has unit L^2 norm on the unit sphere. No Condon-Shortley phase,
/// so N_l^k > 0 near x = 1. The forward recurrence in l runs on a
/// mantissa/binary-exponent pair, so the tiny seed (1 - x^2)^{k/2} never
/// underflows before the recurrence grows it back.
inline double assoc_legendre_norm(int l, int k, double x) {
  if (l < 0 || k < 0 || k > l)
    throw Error(ErrorKind::invalid_argument,
                "assoc_legendre_norm needs 0 <= k <= l (l = " + std::to_string(l) +
                    ", k = " + std::to_string(k) + ")");
  if (!(std::abs(x) <= 1.0)) throw Error(ErrorKind::invalid_argument, "assoc_legendre_norm: |x| > 1");

  const double kk = static_cast<double>(k);
  const double s2 = (1.0 - x) * (1.0 + x);
  if (k > 0 && s2 == 0.0) return 0.0;

  // log N_k^k = 1/2 [log((2k+1)/(4 pi)) + log((2k)! / (4^k (k!)^2))] + (k/2) log(1 - x^2)
  double log_seed = 0.5 * (std::log((2.0 * kk + 1.0) / (4.0 * std::numbers::pi)) +
                           std::lgamma(2.0 * kk + 1.0) - 2.0 * kk * std::numbers::ln2 -
                           2.0 * std::lgamma(kk + 1.0));
  if (k > 0) log_seed += 0.5 * kk * std::log(s2);

  const double log2_seed = log_seed / std::numbers::ln2;
  int exponent = static_cast<int>(std::floor(log2_seed));
  double prev = 0.0;
  double cur = std::exp2(log2_seed - exponent);
  if (l == k) return std::ldexp(cur, exponent);

  const double ratio0 = std::sqrt(2.0 * kk + 3.0);
  prev = cur;
  cur = x * ratio0 * cur;
  double inv_prev_factor = 1.0 / ratio0;
  constexpr double kBig = 0x1p+400;
  constexpr int kShift = 400;
  for (int ll = k + 2; ll <= l; ++ll) {
    const double L = static_cast<double>(ll);
    const double factor = std::sqrt((4.0 * L * L - 1.0) / ((L - kk) * (L + kk)));
    const double next = factor * (x * cur - inv_prev_factor * prev);
    inv_prev_factor = 1.0 / factor;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kBig) {
      cur = std::ldexp(cur, -kShift);
      prev = std::ldexp(prev, -kShift);
      exponent += kShift;
    }
  }
  return std::ldexp(cur, exponent);
}

/// Szego main term sqrt(2 / (pi k sin theta)) cos((k + 1/2) theta - pi/4);
/// requires sin(theta) >= 0.1.
inline double szego_main_term(int k, double theta) {
  if (k < 1) throw Error(ErrorKind::invalid_argument, "szego_main_term: k must be >= 1");
  const double s = std::sin(theta);
  if (!(theta > 0.0 && theta < std::numbers::pi && s >= 0.1))
    throw Error(ErrorKind::out_of_range, "szego_main_term: theta outside the band sin(theta) >= 0.1");
  const double kk = static_cast<double>(k);
  return std::sqrt(2.0 / (std::numbers::pi * kk * s)) *
         std::cos((kk + 0.5) * theta - 0.25 * std::numbers::pi);
}

/// Turning latitudes of Y_l^k: theta0 = arcsin(k h), theta1 = pi - theta0.
/// The allowed region theta0 < theta < theta1 is where 1 - k^2 h^2 / sin^2 > 0.
inline std::pair<double, double> turning_points(const HarmonicIndex& idx) {
  if (idx.k < 1 || idx.k > idx.l)
    throw Error(ErrorKind::invalid_argument, "turning_points needs 1 <= k <= l");
  const double kh = static_cast<double>(idx.k) * idx.h;
  if (kh > 1.0) throw Error(ErrorKind::invalid_argument, "turning_points: k h > 1, no allowed region");
  const double theta0 = std::asin(kh);
  return {theta0, std::numbers::pi - theta0};
}

}  // namespace qcigeo
