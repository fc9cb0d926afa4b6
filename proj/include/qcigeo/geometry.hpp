#pragma once

// Surfaces of revolution generated by a profile f on t in [-1, 1].
//
// Two metrics are attached to a profile:
//  * the symbol chart  g = dt^2 + f(t)^2 dphi^2, in which the moment map and
//    the admissibility test are written (t plays the role of arc length along
//    meridians);
//  * the embedded surface obtained by rotating radius f(t) at height t about
//    the axis, g = (1 + f'(t)^2) dt^2 + f(t)^2 dphi^2. For the sphere profile
//    this is the round unit sphere with t = cos(theta). Spectral computations
//    and line integrals use this metric, parametrised by the polar angle.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcigeo/error.hpp"
#include "qcigeo/quadrature.hpp"

namespace qcigeo {

enum class ProfileKind { sphere, polynomial_perturbed };

inline const char* to_string(ProfileKind kind) noexcept {
  return kind == ProfileKind::sphere ? "sphere" : "polynomial-perturbed";
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

/// Profile with f(t)^2 = (1 - t^2) q(t), q a polynomial positive on [-1, 1].
/// For the sphere q == 1. Immutable once constructed.
class ProfileFunction {
 public:
  ProfileKind kind() const noexcept { return kind_; }
  /// Ascending coefficients of q; empty for the sphere.
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  /// Location of the unique maximum of f^2.
  double t0() const noexcept { return t0_; }

  double q(double t) const noexcept {
    if (coefficients_.empty()) return 1.0;
    double acc = 0.0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }
  double dq(double t) const noexcept {
    double acc = 0.0;
    for (std::size_t i = coefficients_.size(); i-- > 1;)
      acc = acc * t + static_cast<double>(i) * coefficients_[i];
    return acc;
  }
  double d2q(double t) const noexcept {
    double acc = 0.0;
    for (std::size_t i = coefficients_.size(); i-- > 2;)
      acc = acc * t + static_cast<double>(i * (i - 1)) * coefficients_[i];
    return acc;
  }

  double f_squared(double t) const noexcept { return (1.0 - t) * (1.0 + t) * q(t); }
  double f_squared_prime(double t) const noexcept {
    return -2.0 * t * q(t) + (1.0 - t) * (1.0 + t) * dq(t);
  }
  double f_squared_second(double t) const noexcept {
    return -2.0 * q(t) - 4.0 * t * dq(t) + (1.0 - t) * (1.0 + t) * d2q(t);
  }

  double f(double t) const noexcept { return std::sqrt(std::max(0.0, f_squared(t))); }
  /// f'(t); unbounded at t = +-1.
  double fp(double t) const noexcept { return f_squared_prime(t) / (2.0 * f(t)); }

  /// Radius at polar angle theta (t = cos theta): sin(theta) sqrt(q(cos theta)).
  double radius_at_angle(double theta) const noexcept {
    return std::sin(theta) * std::sqrt(q(std::cos(theta)));
  }
  double radius_at_angle_prime(double theta) const noexcept {
    const double t = std::cos(theta);
    const double s = std::sin(theta);
    const double root = std::sqrt(q(t));
    return std::cos(theta) * root - s * s * dq(t) / (2.0 * root);
  }
  /// Embedded meridian speed ds/dtheta; smooth and positive on [0, pi].
  double meridian_speed_angle(double theta) const noexcept {
    return std::hypot(std::sin(theta), radius_at_angle_prime(theta));
  }

  friend ProfileFunction make_profile(ProfileKind kind, std::vector<double> coefficients);

 private:
  ProfileFunction(ProfileKind kind, std::vector<double> coefficients)
      : kind_(kind), coefficients_(std::move(coefficients)) {}

  ProfileKind kind_;
  std::vector<double> coefficients_;
  double t0_ = 0.0;
};

inline bool operator==(const ProfileFunction& a, const ProfileFunction& b) {
  return a.kind() == b.kind() && a.coefficients() == b.coefficients();
}

/// Builds a profile and locates t0 by a sign-change scan of (f^2)' refined by
/// bisection. Throws morse_violation for several critical points or a
/// degenerate maximum, invalid_argument when q is not positive on [-1, 1].
inline ProfileFunction make_profile(ProfileKind kind, std::vector<double> coefficients) {
  if (kind == ProfileKind::sphere && !coefficients.empty())
    throw Error(ErrorKind::invalid_argument, "sphere profile takes no coefficients");
  if (kind == ProfileKind::polynomial_perturbed && coefficients.empty())
    throw Error(ErrorKind::invalid_argument, "polynomial-perturbed profile needs coefficients of q");
  for (double c : coefficients)
    if (!std::isfinite(c)) throw Error(ErrorKind::invalid_argument, "non-finite profile coefficient");

  ProfileFunction profile(kind, std::move(coefficients));

  constexpr int kPositivitySamples = 4000;
  for (int i = 0; i <= kPositivitySamples; ++i) {
    const double t = -1.0 + 2.0 * i / kPositivitySamples;
    if (!(profile.q(t) > 0.0))
      throw Error(ErrorKind::invalid_argument,
                  "q(t) must be positive on [-1, 1]; fails at t = " + std::to_string(t));
  }

  // (f^2)' is 2q(-1) > 0 at -1 and -2q(1) < 0 at +1, so a sign change exists.
  constexpr int kScan = 8192;
  std::vector<double> grid(kScan + 1);
  std::vector<double> slope(kScan + 1);
  for (int i = 0; i <= kScan; ++i) {
    grid[i] = -1.0 + 2.0 * i / kScan;
    slope[i] = profile.f_squared_prime(grid[i]);
  }
  std::vector<std::pair<double, double>> brackets;
  for (int i = 0; i < kScan; ++i) {
    if (slope[i] == 0.0 && i > 0) {
      brackets.emplace_back(grid[i], grid[i]);
    } else if ((slope[i] > 0.0 && slope[i + 1] < 0.0) || (slope[i] < 0.0 && slope[i + 1] > 0.0)) {
      brackets.emplace_back(grid[i], grid[i + 1]);
    }
  }
  if (brackets.size() != 1)
    throw Error(ErrorKind::morse_violation,
                "f^2 must have exactly one interior critical point, found " +
                    std::to_string(brackets.size()));
  // Touching zeros of (f^2)' do not change sign; catch them as near-zero
  // interior local minima of |(f^2)'| away from the bracket.
  for (int i = 1; i < kScan; ++i) {
    const double a = std::abs(slope[i]);
    if (a < 1e-9 && a <= std::abs(slope[i - 1]) && a <= std::abs(slope[i + 1]) &&
        (grid[i] < brackets[0].first - 1e-3 || grid[i] > brackets[0].second + 1e-3))
      throw Error(ErrorKind::morse_violation, "f^2 has a degenerate critical point near t = " +
                                                  std::to_string(grid[i]));
  }

  double lo = brackets[0].first;
  double hi = brackets[0].second;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (profile.f_squared_prime(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  double t0 = 0.5 * (lo + hi);
  if (std::abs(t0) < 1e-12) t0 = 0.0;
  if (!(profile.f_squared_second(t0) < -1e-10))
    throw Error(ErrorKind::morse_violation, "maximum of f^2 is degenerate");
  profile.t0_ = t0;
  return profile;
}

inline ProfileFunction sphere_profile() { return make_profile(ProfileKind::sphere, {}); }

// t = cos(theta) conversions between the symbol chart and the polar angle.
inline double t_from_angle(double theta) noexcept { return std::cos(theta); }
inline double angle_from_t(double t) noexcept { return std::acos(std::clamp(t, -1.0, 1.0)); }

enum class GeodesicKind { latitude, longitude };

inline const char* to_string(GeodesicKind kind) noexcept {
  return kind == GeodesicKind::latitude ? "latitude" : "longitude";
}

struct GeodesicPoint {
  double t = 0.0;
  double phi = 0.0;
  /// Coordinate velocity (dt/dtau, dphi/dtau) of the unit-speed chart parametrisation.
  std::array<double, 2> tangent{};
};

/// Parametrisation of an arc by a smooth parameter s in [lo, hi] together
/// with the embedded arc-length density ds_embedded/ds.
struct ArcMeasure {
  Interval range;
  /// true: s is the azimuth phi at fixed t; false: s is the polar angle theta at fixed phi.
  bool along_latitude = true;
  double fixed = 0.0;

  double t_at(double s) const noexcept { return along_latitude ? fixed : t_from_angle(s); }
  double phi_at(double s) const noexcept { return along_latitude ? s : fixed; }
};

/// A unit-speed geodesic arc (chart metric): the latitude circle t = t0 or a
/// meridian phi = phi0.
///  * latitude: tau in [0, f(t0)(beta - alpha)], phi = alpha + tau / f(t0);
///  * longitude: tau = t in [a, b].
class Geodesic {
 public:
  GeodesicKind kind() const noexcept { return kind_; }
  /// t0 for latitude arcs, phi0 for longitude arcs.
  double fixed_coordinate() const noexcept { return fixed_; }
  /// phi-range for latitude arcs, t-range for longitude arcs.
  const Interval& coordinate_range() const noexcept { return range_; }
  const ProfileFunction& surface() const noexcept { return surface_; }

  Interval param_range() const noexcept {
    if (kind_ == GeodesicKind::latitude) return {0.0, radius_ * range_.length()};
    return range_;
  }
  /// Chart arc length.
  double length() const noexcept { return param_range().length(); }

  GeodesicPoint point(double tau) const {
    const Interval r = param_range();
    if (!(tau >= r.lo && tau <= r.hi))
      throw Error(ErrorKind::out_of_range,
                  "tau = " + std::to_string(tau) + " outside [" + std::to_string(r.lo) + ", " +
                      std::to_string(r.hi) + "]");
    return point_unchecked(tau);
  }

  /// Same as point() without the range check (used for finite differences
  /// that straddle the endpoints).
  GeodesicPoint point_unchecked(double tau) const noexcept {
    if (kind_ == GeodesicKind::latitude)
      return {fixed_, range_.lo + tau / radius_, {0.0, 1.0 / radius_}};
    return {tau, fixed_, {1.0, 0.0}};
  }

  /// The same arc on the embedded surface, parametrised by phi (latitude) or
  /// by the polar angle (longitude, theta ascending).
  ArcMeasure embedded_measure() const noexcept {
    if (kind_ == GeodesicKind::latitude) return {range_, true, fixed_};
    return {{angle_from_t(range_.hi), angle_from_t(range_.lo)}, false, fixed_};
  }
  /// ds_embedded / ds at parameter s of embedded_measure().
  double embedded_density(double s) const noexcept {
    if (kind_ == GeodesicKind::latitude) return radius_;
    return surface_.meridian_speed_angle(s);
  }
  /// Arc length on the embedded surface.
  double embedded_length() const {
    const ArcMeasure m = embedded_measure();
    if (kind_ == GeodesicKind::latitude) return radius_ * m.range.length();
    static const GaussLegendreRule rule = gauss_legendre(24);
    return composite_gauss([this](double s) { return embedded_density(s); }, m.range.lo,
                           m.range.hi, 16, rule);
  }

  friend Geodesic latitude_arc(const ProfileFunction&, Interval);
  friend Geodesic longitude_arc(const ProfileFunction&, Interval, double);

 private:
  Geodesic(GeodesicKind kind, double fixed, Interval range, ProfileFunction surface)
      : kind_(kind), fixed_(fixed), range_(range), surface_(std::move(surface)),
        radius_(kind == GeodesicKind::latitude ? surface_.f(fixed) : 1.0) {}

  GeodesicKind kind_;
  double fixed_;
  Interval range_;
  ProfileFunction surface_;
  double radius_;
};

/// Arc of the latitude circle t = t0 (the only latitude that is a geodesic).
inline Geodesic latitude_arc(const ProfileFunction& profile, Interval phi_range) {
  if (!(phi_range.hi > phi_range.lo))
    throw Error(ErrorKind::invalid_argument, "latitude arc needs a non-empty phi range");
  if (!(phi_range.length() < 2.0 * std::numbers::pi))
    throw Error(ErrorKind::invalid_argument, "latitude arc phi range must be shorter than 2*pi");
  return Geodesic(GeodesicKind::latitude, profile.t0(), phi_range, profile);
}

/// Latitude request at an explicit t; anything but t0 is not a geodesic.
inline Geodesic latitude_arc(const ProfileFunction& profile, double t, Interval phi_range) {
  if (std::abs(t - profile.t0()) > 1e-12)
    throw Error(ErrorKind::not_a_geodesic, "latitude t = " + std::to_string(t) +
                                               " is not a geodesic (t0 = " +
                                               std::to_string(profile.t0()) + ")");
  return latitude_arc(profile, phi_range);
}

inline Geodesic longitude_arc(const ProfileFunction& profile, Interval t_range, double phi0) {
  if (!(t_range.hi > t_range.lo))
    throw Error(ErrorKind::invalid_argument, "longitude arc needs a non-empty t range");
  if (!(t_range.lo > -1.0 && t_range.hi < 1.0))
    throw Error(ErrorKind::invalid_argument, "longitude arc must stay inside (-1, 1)");
  return Geodesic(GeodesicKind::longitude, phi0, t_range, profile);
}

/// Meridian arc given by a polar-angle range [theta_lo, theta_hi].
inline Geodesic longitude_arc_by_angle(const ProfileFunction& profile, Interval theta_range,
                                       double phi0) {
  return longitude_arc(profile, {t_from_angle(theta_range.hi), t_from_angle(theta_range.lo)}, phi0);
}

}  // namespace qcigeo
