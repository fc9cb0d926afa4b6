#pragma once

// Families of (h, |integral|) experiments and log-log decay fits.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcigeo/eigensolve.hpp"
#include "qcigeo/error.hpp"
#include "qcigeo/geometry.hpp"
#include "qcigeo/lineintegral.hpp"
#include "qcigeo/parallel.hpp"
#include "qcigeo/specfun.hpp"

namespace qcigeo {

enum class Experiment { zonal_equator, tesseral_caustic, transition_peak, custom };

inline const char* to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::zonal_equator: return "zonal-equator";
    case Experiment::tesseral_caustic: return "tesseral-caustic";
    case Experiment::transition_peak: return "transition-peak";
    case Experiment::custom: return "custom";
  }
  return "?";
}

inline std::optional<Experiment> experiment_from_string(std::string_view s) {
  if (s == "zonal-equator") return Experiment::zonal_equator;
  if (s == "tesseral-caustic") return Experiment::tesseral_caustic;
  if (s == "transition-peak") return Experiment::transition_peak;
  if (s == "custom") return Experiment::custom;
  return std::nullopt;
}

struct SweepRow {
  int k = 0;
  int l = 0;
  double h = 0.0;
  double abs_I = 0.0;
  double re_I = 0.0;
  double im_I = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct DecayPoint {
  double h;
  double magnitude;
};

struct DecayFit {
  double slope = 0.0;
  double intercept_logC = 0.0;
  double r_squared = 0.0;
  std::size_t used = 0;
  /// points discarded because their magnitude was zero
  std::size_t dropped_zero = 0;
};

struct SweepReport {
  Experiment experiment = Experiment::custom;
  std::vector<SweepRow> rows;  ///< h descending
  std::optional<double> slope;
  std::optional<double> intercept_logC;
  std::optional<double> r_squared;
  std::optional<double> delta0;
  std::optional<QuadratureSpec> quadrature;

  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

/// Least squares of log(magnitude) on log(h): magnitude ~ exp(intercept) h^slope.
inline DecayFit fit_decay(std::span<const DecayPoint> points) {
  DecayFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const DecayPoint& p : points) {
    if (!(p.h > 0.0) || !std::isfinite(p.h) || !(p.magnitude >= 0.0) || !std::isfinite(p.magnitude))
      throw Error(ErrorKind::degenerate_fit, "fit_decay needs positive finite h and magnitudes");
    if (p.magnitude == 0.0) {
      ++fit.dropped_zero;
      continue;
    }
    xs.push_back(std::log(p.h));
    ys.push_back(std::log(p.magnitude));
  }
  if (xs.size() < 3)
    throw Error(ErrorKind::degenerate_fit, "fit_decay needs at least 3 points with non-zero magnitude, got " +
                                               std::to_string(xs.size()));
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::degenerate_fit, "fit_decay: all h are equal");
  fit.slope = sxy / sxx;
  fit.intercept_logC = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept_logC + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.used = xs.size();
  return fit;
}

struct SweepOptions {
  QuadratureSpec quadrature;
  unsigned threads = 1;
};

namespace detail {

inline void fit_report(SweepReport& report) {
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.h > b.h; });
  std::vector<DecayPoint> pts;
  pts.reserve(report.rows.size());
  for (const SweepRow& r : report.rows) pts.push_back({r.h, r.abs_I});
  const DecayFit fit = fit_decay(pts);
  report.slope = fit.slope;
  report.intercept_logC = fit.intercept_logC;
  report.r_squared = fit.r_squared;
}

inline void require_fit_size(std::span<const int> k_list) {
  if (k_list.size() < 3)
    throw Error(ErrorKind::degenerate_fit,
                "a sweep needs at least 3 values of k for a fit, got " + std::to_string(k_list.size()));
}

inline SweepRow row_from_integral(int k, int l, double h, std::complex<double> value) {
  return {k, l, h, std::abs(value), value.real(), value.imag()};
}

}  // namespace detail

/// Generic harness: one row per k from `row_fn`, rows computed in parallel
/// and assembled in h-descending order, then fitted.
inline SweepReport run_custom_sweep(std::span<const int> k_list,
                                    const std::function<SweepRow(int)>& row_fn, unsigned threads = 1,
                                    Experiment label = Experiment::custom) {
  detail::require_fit_size(k_list);
  SweepReport report;
  report.experiment = label;
  report.rows.resize(k_list.size());
  parallel_for(k_list.size(), threads, [&](std::size_t i) { report.rows[i] = row_fn(k_list[i]); });
  detail::fit_report(report);
  return report;
}

/// Zonal harmonics sqrt((2k+1)/(4 pi)) P_k(t) integrated over `arc` (sphere
/// only). Odd k are rejected: they vanish identically on the equator.
inline SweepReport run_zonal_sweep(std::span<const int> k_list, const Geodesic& arc,
                                   const SweepOptions& options = {}) {
  if (arc.surface().kind() != ProfileKind::sphere)
    throw Error(ErrorKind::invalid_argument, "zonal sweep is defined on the sphere profile");
  for (int k : k_list) {
    if (k < 2 || k % 2 != 0)
      throw Error(ErrorKind::invalid_argument,
                  "zonal sweep needs even k >= 2 (odd zonal harmonics vanish on the equator), got " +
                      std::to_string(k));
    if (k > 2000) throw Error(ErrorKind::invalid_argument, "zonal sweep supports k <= 2000");
  }
  SweepReport report = run_custom_sweep(
      k_list,
      [&](int k) {
        const double norm = std::sqrt((2.0 * k + 1.0) / (4.0 * std::numbers::pi));
        const double h = make_harmonic_index(k, 0).h;
        const auto u = [k, norm](double t, double) { return norm * legendre_P(k, t); };
        return detail::row_from_integral(k, k, h, integrate_restriction(u, arc, options.quadrature, h));
      },
      options.threads, Experiment::zonal_equator);
  report.quadrature = options.quadrature;
  return report;
}

enum class ArcSide {
  forbidden,  ///< theta in [theta0 - delta0, theta0]: from the forbidden region to the caustic
  allowed,    ///< theta in [theta0, theta0 + delta0]
};

struct TesseralOptions {
  ArcSide side = ArcSide::forbidden;
  /// Grid for the eigensolve route on non-sphere profiles; 0 picks max(2048, 32 l).
  std::size_t eigen_grid = 0;
};

/// Polar angle of the first turning latitude of a mode with angular
/// momentum k h on a general profile: radius f(cos theta) = k h.
inline double caustic_angle(const ProfileFunction& profile, double kh) {
  const double top = angle_from_t(profile.t0());
  if (!(kh > 0.0) || !(kh < profile.radius_at_angle(top)))
    throw Error(ErrorKind::invalid_argument, "k h outside (0, max f): no turning point");
  double lo = 0.0;
  double hi = top;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (profile.radius_at_angle(mid) < kh) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Tesseral family l = 2k integrated along the meridian phi = 0 near the
/// turning latitude theta0. Sphere: exact N_{2k}^k; other profiles: eigensolve.
inline SweepReport run_tesseral_sweep(std::span<const int> k_list, double delta0,
                                      const ProfileFunction& profile, const SweepOptions& options = {},
                                      const TesseralOptions& tess = {}) {
  if (!(delta0 > 0.0)) throw Error(ErrorKind::invalid_argument, "delta0 must be positive");
  for (int k : k_list)
    if (k < 1) throw Error(ErrorKind::invalid_argument, "tesseral sweep needs k >= 1");
  const bool sphere = profile.kind() == ProfileKind::sphere;

  const auto arc_for = [&](double theta0) {
    Interval range = tess.side == ArcSide::forbidden ? Interval{theta0 - delta0, theta0}
                                                     : Interval{theta0, theta0 + delta0};
    if (!(range.lo > 0.0 && range.hi < std::numbers::pi))
      throw Error(ErrorKind::invalid_argument, "delta0 = " + std::to_string(delta0) +
                                                   " takes the arc out of the chart (theta0 = " +
                                                   std::to_string(theta0) + ")");
    return longitude_arc_by_angle(profile, range, 0.0);
  };

  SweepReport report = run_custom_sweep(
      k_list,
      [&](int k) {
        const int l = 2 * k;
        if (sphere) {
          const HarmonicIndex idx = make_harmonic_index(l, k);
          const Geodesic arc = arc_for(turning_points(idx).first);
          const auto u = [l, k](double t, double phi) {
            return assoc_legendre_norm(l, k, t) * std::polar(1.0, k * phi);
          };
          return detail::row_from_integral(k, l, idx.h, integrate_restriction(u, arc, options.quadrature, idx.h));
        }
        std::size_t n = tess.eigen_grid ? tess.eigen_grid : std::max<std::size_t>(2048, 32 * l);
        n += n % 2;
        const JointEigenfunction mode = solve_joint_eigenfunction(profile, k, static_cast<std::size_t>(l - k), n);
        const double h = mode.h();
        const Geodesic arc = arc_for(caustic_angle(profile, k * h));
        const auto u = [&mode](double t, double phi) { return mode.value(t, phi); };
        return detail::row_from_integral(k, l, h, integrate_restriction(u, arc, options.quadrature, h));
      },
      options.threads, Experiment::tesseral_caustic);
  report.delta0 = delta0;
  report.quadrature = options.quadrature;
  return report;
}

/// sup |N_{2k}^k(cos theta)| over theta in [theta0 - w, theta0 + w], w = width_scale h^{2/3}.
inline double transition_peak(int k, double width_scale = 1.0) {
  const int l = 2 * k;
  const HarmonicIndex idx = make_harmonic_index(l, k);
  const double theta0 = turning_points(idx).first;
  const double w = width_scale * std::pow(idx.h, 2.0 / 3.0);
  const auto mag = [l, k](double th) { return std::abs(assoc_legendre_norm(l, k, std::cos(th))); };

  constexpr int kSamples = 2000;
  const double lo = theta0 - w;
  const double step = 2.0 * w / kSamples;
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double v = mag(lo + step * i);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  // golden-section refinement inside the neighbouring samples
  double a = lo + step * std::max(0, best - 1);
  double b = lo + step * std::min(kSamples, best + 1);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = mag(c);
  double fd = mag(d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = mag(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = mag(d);
    }
  }
  return std::max({best_val, fc, fd});
}

/// Transition-region peak of the l = 2k tesseral harmonic versus h.
inline SweepReport run_transition_peak_sweep(std::span<const int> k_list, double width_scale = 1.0,
                                             unsigned threads = 1) {
  if (!(width_scale > 0.0)) throw Error(ErrorKind::invalid_argument, "width scale must be positive");
  for (int k : k_list)
    if (k < 1) throw Error(ErrorKind::invalid_argument, "transition-peak sweep needs k >= 1");
  return run_custom_sweep(
      k_list,
      [width_scale](int k) {
        const double peak = transition_peak(k, width_scale);
        return SweepRow{k, 2 * k, make_harmonic_index(2 * k, k).h, peak, peak, 0.0};
      },
      threads, Experiment::transition_peak);
}

/// Harmonics N_l^k e^{ik phi} with l = l_ratio k integrated over an arbitrary
/// arc on the sphere.
inline SweepReport run_harmonic_family_sweep(std::span<const int> k_list, int l_ratio, const Geodesic& arc,
                                             const SweepOptions& options = {}) {
  if (arc.surface().kind() != ProfileKind::sphere)
    throw Error(ErrorKind::invalid_argument, "harmonic family sweep is defined on the sphere profile");
  if (l_ratio < 1) throw Error(ErrorKind::invalid_argument, "l_ratio must be >= 1");
  for (int k : k_list)
    if (k < 1) throw Error(ErrorKind::invalid_argument, "harmonic family sweep needs k >= 1");
  SweepReport report = run_custom_sweep(
      k_list,
      [&](int k) {
        const int l = l_ratio * k;
        const HarmonicIndex idx = make_harmonic_index(l, k);
        const auto u = [l, k](double t, double phi) {
          return assoc_legendre_norm(l, k, t) * std::polar(1.0, k * phi);
        };
        return detail::row_from_integral(k, l, idx.h, integrate_restriction(u, arc, options.quadrature, idx.h));
      },
      options.threads, Experiment::custom);
  report.quadrature = options.quadrature;
  return report;
}

}  // namespace qcigeo
