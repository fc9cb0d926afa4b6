#pragma once

// Integral of a surface function along a geodesic arc, with respect to the
// arc length of the embedded surface, by composite Gauss-Legendre panels
// sized to the wavelength 2 pi h.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "qcigeo/error.hpp"
#include "qcigeo/geometry.hpp"
#include "qcigeo/quadrature.hpp"

namespace qcigeo {

struct QuadratureSpec {
  int nodes_per_panel = 12;
  double panels_per_wavelength = 4.0;
  std::size_t max_panels = 1'000'000;

  void validate() const {
    if (nodes_per_panel < 4) throw Error(ErrorKind::invalid_argument, "nodes_per_panel must be >= 4");
    if (!(panels_per_wavelength >= 2.0))
      throw Error(ErrorKind::invalid_argument, "panels_per_wavelength must be >= 2");
    if (max_panels == 0) throw Error(ErrorKind::invalid_argument, "max_panels must be positive");
  }
};

inline bool operator==(const QuadratureSpec& a, const QuadratureSpec& b) {
  return a.nodes_per_panel == b.nodes_per_panel && a.panels_per_wavelength == b.panels_per_wavelength &&
         a.max_panels == b.max_panels;
}

/// Callable (t, phi) returning a real or complex value.
template <class F>
concept SurfaceFunction = std::is_invocable_v<const F&, double, double>;

/// Number of panels so that each is at most 2 pi h / panels_per_wavelength
/// long in embedded arc length.
inline std::size_t panel_count(const Geodesic& gamma, const QuadratureSpec& spec, double h) {
  spec.validate();
  if (!(h > 0.0)) throw Error(ErrorKind::invalid_argument, "h must be positive");
  const ArcMeasure m = gamma.embedded_measure();
  double max_density = 0.0;
  constexpr int kProbe = 256;
  for (int i = 0; i <= kProbe; ++i)
    max_density = std::max(max_density, gamma.embedded_density(m.range.lo + m.range.length() * i / kProbe));
  const double panel_len = 2.0 * std::numbers::pi * h / spec.panels_per_wavelength;
  const double wanted = std::ceil(max_density * m.range.length() / panel_len);
  if (!(wanted <= static_cast<double>(spec.max_panels)))
    throw Error(ErrorKind::panel_limit, "h = " + std::to_string(h) + " needs " + std::to_string(wanted) +
                                            " panels, above max_panels = " + std::to_string(spec.max_panels));
  return std::max<std::size_t>(1, static_cast<std::size_t>(wanted));
}

/// Integral with an explicit panel count.
template <SurfaceFunction F>
std::complex<double> integrate_panels(const F& u, const Geodesic& gamma, const QuadratureSpec& spec,
                                      std::size_t panels) {
  spec.validate();
  if (panels == 0 || panels > spec.max_panels)
    throw Error(ErrorKind::panel_limit, "panel count " + std::to_string(panels) + " outside [1, max_panels]");
  const GaussLegendreRule rule = gauss_legendre(static_cast<std::size_t>(spec.nodes_per_panel));
  const ArcMeasure m = gamma.embedded_measure();
  const double width = m.range.length() / static_cast<double>(panels);
  std::vector<std::complex<double>> sums(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = m.range.lo + width * (static_cast<double>(p) + 0.5);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double s = mid + 0.5 * width * rule.nodes[i];
      const std::complex<double> value = u(m.t_at(s), m.phi_at(s));
      acc += rule.weights[i] * gamma.embedded_density(s) * value;
    }
    sums[p] = 0.5 * width * acc;
  }
  return pairwise_sum(std::span<const std::complex<double>>(sums));
}

/// Integral of u over gamma at the wavelength-based panel count for h.
template <SurfaceFunction F>
std::complex<double> integrate_restriction(const F& u, const Geodesic& gamma, const QuadratureSpec& spec,
                                           double h) {
  return integrate_panels(u, gamma, spec, panel_count(gamma, spec, h));
}

struct AdaptiveIntegral {
  std::complex<double> value;
  double error_estimate = 0.0;
  std::size_t panels = 0;
};

/// Runs the panel count for h and its double; returns the finer value and
/// the difference as the error estimate.
template <SurfaceFunction F>
AdaptiveIntegral integrate_adaptive(const F& u, const Geodesic& gamma, const QuadratureSpec& spec, double h) {
  const std::size_t n = panel_count(gamma, spec, h);
  const std::complex<double> coarse = integrate_panels(u, gamma, spec, n);
  const std::complex<double> fine = integrate_panels(u, gamma, spec, 2 * n);
  return {fine, std::abs(fine - coarse), 2 * n};
}

}  // namespace qcigeo
