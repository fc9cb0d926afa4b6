#pragma once

// Admissibility of a geodesic for a moment map (p1, p2) at energies (E1, E2):
// sample C_gamma = {p1 = E1} over the arc and estimate inf |d/dtau p2| on the
// band |p2 - E2| < epsilon.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qcigeo/error.hpp"
#include "qcigeo/geometry.hpp"
#include "qcigeo/symbol_dsl.hpp"

namespace qcigeo {

struct EnergyPair {
  double E1 = 1.0;
  double E2 = 0.0;
  /// Band half-width; defaults to 5% of the range of p2 over C_gamma.
  std::optional<double> epsilon;
};

struct SurfacePoint {
  double t = 0.0;
  double phi = 0.0;
};

/// A covector on the fiber p1 = E1 together with its fiber angle: the
/// ellipse angle for the built-in p1, the ray direction otherwise.
struct FiberPoint {
  double sigma = 0.0;
  double xi_t = 0.0;
  double xi_phi = 0.0;
};

struct AdmissibilityGrid {
  std::size_t n_tau = 128;
  std::size_t n_fiber = 128;
};

enum class Verdict { admissible, not_admissible, empty_band };

inline const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::admissible: return "admissible";
    case Verdict::not_admissible: return "not-admissible";
    case Verdict::empty_band: return "empty-band";
  }
  return "?";
}

struct AdmissibilityWitness {
  double tau = 0.0;
  double sigma = 0.0;
  PhasePoint point;
};

struct AdmissibilityReport {
  Verdict verdict = Verdict::empty_band;
  /// Estimated inf |d/dtau p2| over the sampled band (raw, not normalised).
  double min_derivative = 0.0;
  AdmissibilityWitness witness;
  bool principal_type_ok = false;
  AdmissibilityGrid grid;
  double epsilon = 0.0;
  /// max |p2| over the sampled C_gamma; the verdict threshold is relative to it.
  double p2_scale = 1.0;
  double threshold = 1e-3;
  std::size_t band_points = 0;
};

namespace detail {

inline bool kinetic_p1(const MomentMap& map) {
  return map.p1.builtin() == BuiltinSymbol::kinetic;
}

// p1 - E1 along the ray r (cos a, sin a); nullopt where p1 is undefined.
struct RayResidual {
  const MomentMap& map;
  SurfacePoint x;
  double E1;
  double c;
  double s;

  std::optional<double> operator()(double r) const {
    try {
      const double v = map.eval_p1({x.t, x.phi, r * c, r * s}) - E1;
      if (!std::isfinite(v)) return std::nullopt;
      return v;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::domain) return std::nullopt;
      throw;
    }
  }

  std::optional<double> slope(double r) const {
    const double step = 1e-6 * std::max(1.0, std::abs(r));
    const auto a = (*this)(r + step);
    const auto b = (*this)(r - step);
    if (!a || !b) return std::nullopt;
    return (*a - *b) / (2.0 * step);
  }
};

inline constexpr double kFiberTolerance = 1e-10;

// Plain Newton; used from a nearby seed and for tangential (even-order) roots.
inline std::optional<double> ray_newton(const RayResidual& g, double r, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const auto v = g(r);
    if (!v) return std::nullopt;
    if (*v == 0.0) return r;
    const auto d = g.slope(r);
    if (!d || *d == 0.0 || !std::isfinite(*d)) break;
    const double step = *v / *d;
    r -= step;
    if (!(r > 0.0)) return std::nullopt;
    if (std::abs(step) <= 1e-15 * std::max(1.0, r)) break;
  }
  const auto v = g(r);
  if (v && std::abs(*v) <= kFiberTolerance) return r;
  return std::nullopt;
}

// Sign-change bracket [lo, hi] refined by Newton with bisection fallback.
inline std::optional<double> ray_bracketed(const RayResidual& g, double lo, double hi, double glo) {
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const auto v = g(r);
    if (!v) return std::nullopt;
    if (*v == 0.0) return r;
    if ((*v < 0.0) == (glo < 0.0)) {
      lo = r;
      glo = *v;
    } else {
      hi = r;
    }
    const auto d = g.slope(r);
    double next = 0.5 * (lo + hi);
    if (d && *d != 0.0) {
      const double newton = r - *v / *d;
      if (newton > lo && newton < hi) next = newton;
    }
    if (std::abs(next - r) <= 1e-16 * std::max(1.0, r) || hi - lo <= 1e-16 * std::max(1.0, r)) {
      r = next;
      break;
    }
    r = next;
  }
  const auto v = g(r);
  if (v && std::abs(*v) <= kFiberTolerance) return r;
  return std::nullopt;
}

// First radius along the ray where p1 reaches E1. Scans a geometric grid
// from 1e-6 to 1e4; sign changes are bracketed, near-zero local minima of
// |p1 - E1| are tried with Newton (tangential level sets).
inline std::optional<double> ray_radius(const RayResidual& g) {
  std::vector<double> radii;
  radii.push_back(0.0);
  for (double r = 1e-6; r <= 1e4; r *= 1.05) radii.push_back(r);
  std::vector<std::optional<double>> values(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) values[j] = g(radii[j]);

  int newton_attempts = 0;
  for (std::size_t j = 0; j + 1 < radii.size(); ++j) {
    if (!values[j]) continue;
    const double a = *values[j];
    if (a == 0.0 && radii[j] > 0.0) return radii[j];
    if (values[j + 1] && ((a < 0.0) != (*values[j + 1] < 0.0)) && *values[j + 1] != 0.0)
      if (auto r = ray_bracketed(g, radii[j], radii[j + 1], a)) return r;
    if (j > 0 && values[j - 1] && values[j + 1] && newton_attempts < 4) {
      const double m = std::abs(a);
      if (m <= std::abs(*values[j - 1]) && m <= std::abs(*values[j + 1]) &&
          m < 1e-2 * std::max(1.0, std::abs(g.E1))) {
        ++newton_attempts;
        if (auto r = ray_newton(g, radii[j], 200)) return r;
      }
    }
  }
  return std::nullopt;
}

inline FiberPoint ellipse_point(const ProfileFunction& surface, double t, double E1, double sigma) {
  const double root = std::sqrt(E1);
  return {sigma, root * std::cos(sigma), root * surface.f(t) * std::sin(sigma)};
}

inline double fiber_angle(std::size_t j, std::size_t n) {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
}

// Fiber point at angle sigma; nullopt when the ray misses the level set.
inline std::optional<FiberPoint> fiber_point_at(const MomentMap& map, SurfacePoint x, double E1,
                                                double sigma, std::optional<double> seed) {
  if (kinetic_p1(map)) {
    if (!(E1 > 0.0)) return std::nullopt;
    return ellipse_point(map.surface, x.t, E1, sigma);
  }
  const RayResidual g{map, x, E1, std::cos(sigma), std::sin(sigma)};
  std::optional<double> r;
  if (seed) r = ray_newton(g, *seed, 60);
  if (r && std::abs(*r - *seed) > 1e-3 * std::max(1.0, *seed)) r.reset();
  if (!r) r = ray_radius(g);
  if (!r) return std::nullopt;
  return FiberPoint{sigma, *r * g.c, *r * g.s};
}

inline std::vector<double> tau_samples(const Geodesic& gamma, std::size_t n) {
  const Interval r = gamma.param_range();
  std::vector<double> taus(n);
  for (std::size_t i = 0; i < n; ++i)
    taus[i] = r.lo + r.length() * static_cast<double>(i) / static_cast<double>(n - 1);
  taus.back() = r.hi;
  // A meridian crossing the latitude t0 must sample it: that is where the
  // tau-derivative of the angular momentum vanishes.
  if (gamma.kind() == GeodesicKind::longitude) {
    const double t0 = gamma.surface().t0();
    if (r.lo < t0 && t0 < r.hi && std::find(taus.begin(), taus.end(), t0) == taus.end()) {
      taus.push_back(t0);
      std::sort(taus.begin(), taus.end());
    }
  }
  return taus;
}

inline SurfacePoint surface_point(const Geodesic& gamma, double tau) {
  const GeodesicPoint p = gamma.point_unchecked(tau);
  return {p.t, p.phi};
}

inline double gradient_norm(const MomentMap& map, const PhasePoint& p) {
  const double ht = 1e-6 * std::max(1.0, std::abs(p.xi_t));
  const double hp = 1e-6 * std::max(1.0, std::abs(p.xi_phi));
  const double dt = (map.eval_p1({p.t, p.phi, p.xi_t + ht, p.xi_phi}) -
                     map.eval_p1({p.t, p.phi, p.xi_t - ht, p.xi_phi})) / (2.0 * ht);
  const double dp = (map.eval_p1({p.t, p.phi, p.xi_t, p.xi_phi + hp}) -
                     map.eval_p1({p.t, p.phi, p.xi_t, p.xi_phi - hp})) / (2.0 * hp);
  return std::hypot(dt, dp);
}

}  // namespace detail

/// Covectors xi over x with p1(x, xi) = E1 at n equally spaced fiber angles.
/// Throws empty_fiber when no angle reaches the level set.
inline std::vector<FiberPoint> fiber_points(const MomentMap& map, SurfacePoint x, double E1,
                                            std::size_t n) {
  if (n < 4) throw Error(ErrorKind::invalid_argument, "fiber_points needs n >= 4");
  std::vector<FiberPoint> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j)
    if (auto p = detail::fiber_point_at(map, x, E1, detail::fiber_angle(j, n), std::nullopt))
      out.push_back(*p);
  if (out.empty())
    throw Error(ErrorKind::empty_fiber, "p1 = " + std::to_string(E1) + " has no point over (t = " +
                                            std::to_string(x.t) + ", phi = " + std::to_string(x.phi) + ")");
  return out;
}

/// True iff |d_xi p1| > 1e-6 at every sampled point of C_gamma.
inline bool check_principal_type(const MomentMap& map, const Geodesic& gamma, double E1,
                                 AdmissibilityGrid grid = {}) {
  for (double tau : detail::tau_samples(gamma, grid.n_tau)) {
    const SurfacePoint x = detail::surface_point(gamma, tau);
    for (const FiberPoint& fp : fiber_points(map, x, E1, grid.n_fiber))
      if (!(detail::gradient_norm(map, {x.t, x.phi, fp.xi_t, fp.xi_phi}) > 1e-6)) return false;
  }
  return true;
}

/// Samples the arc and the fiber, keeps points with |p2 - E2| < epsilon and
/// estimates d/dtau p2 there by central differences at fixed fiber angle.
inline AdmissibilityReport check_admissible(const MomentMap& map, const Geodesic& gamma,
                                            const EnergyPair& energies,
                                            AdmissibilityGrid grid = {}, double threshold = 1e-3) {
  if (grid.n_tau < 32 || grid.n_fiber < 32)
    throw Error(ErrorKind::invalid_argument, "admissibility grid needs at least 32 x 32 samples");
  if (!(threshold > 0.0)) throw Error(ErrorKind::invalid_argument, "threshold must be positive");
  if (energies.epsilon && !(*energies.epsilon > 0.0))
    throw Error(ErrorKind::invalid_argument, "epsilon must be positive");

  struct Sample {
    double tau;
    SurfacePoint x;
    FiberPoint fiber;
    double p2;
  };
  std::vector<Sample> samples;
  AdmissibilityReport report;
  report.grid = grid;
  report.threshold = threshold;
  report.principal_type_ok = true;

  const double E1 = energies.E1;
  for (double tau : detail::tau_samples(gamma, grid.n_tau)) {
    const SurfacePoint x = detail::surface_point(gamma, tau);
    for (const FiberPoint& fp : fiber_points(map, x, E1, grid.n_fiber)) {
      const PhasePoint p{x.t, x.phi, fp.xi_t, fp.xi_phi};
      if (!(detail::gradient_norm(map, p) > 1e-6)) report.principal_type_ok = false;
      samples.push_back({tau, x, fp, map.eval_p2(p)});
    }
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double scale = 0.0;
  for (const Sample& s : samples) {
    lo = std::min(lo, s.p2);
    hi = std::max(hi, s.p2);
    scale = std::max(scale, std::abs(s.p2));
  }
  report.p2_scale = scale > 0.0 ? scale : 1.0;
  report.epsilon = energies.epsilon ? *energies.epsilon : (hi > lo ? 0.05 * (hi - lo) : 0.05);

  double best = std::numeric_limits<double>::infinity();
  for (const Sample& s : samples) {
    if (!(std::abs(s.p2 - energies.E2) < report.epsilon)) continue;
    ++report.band_points;
    const double step = 1e-6 * std::max(1.0, std::abs(s.tau));
    const SurfacePoint xp = detail::surface_point(gamma, s.tau + step);
    const SurfacePoint xm = detail::surface_point(gamma, s.tau - step);
    const double seed = std::hypot(s.fiber.xi_t, s.fiber.xi_phi);
    const auto fp = detail::fiber_point_at(map, xp, E1, s.fiber.sigma, seed);
    const auto fm = detail::fiber_point_at(map, xm, E1, s.fiber.sigma, seed);
    if (!fp || !fm)
      throw Error(ErrorKind::empty_fiber, "fiber lost while differentiating at tau = " +
                                              std::to_string(s.tau));
    const double dp2 = (map.eval_p2({xp.t, xp.phi, fp->xi_t, fp->xi_phi}) -
                        map.eval_p2({xm.t, xm.phi, fm->xi_t, fm->xi_phi})) /
                       (2.0 * step);
    if (std::abs(dp2) < best) {
      best = std::abs(dp2);
      report.witness = {s.tau, s.fiber.sigma, {s.x.t, s.x.phi, s.fiber.xi_t, s.fiber.xi_phi}};
    }
  }

  if (report.band_points == 0) {
    report.verdict = Verdict::empty_band;
    report.min_derivative = 0.0;
    return report;
  }
  report.min_derivative = best;
  report.verdict = (best > threshold * report.p2_scale && report.principal_type_ok)
                       ? Verdict::admissible
                       : Verdict::not_admissible;
  return report;
}

}  // namespace qcigeo
