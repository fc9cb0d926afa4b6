#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "qcigeo/lineintegral.hpp"
#include "qcigeo/specfun.hpp"

using namespace qcigeo;

namespace {

constexpr double pi = std::numbers::pi;

const ProfileFunction& sphere() {
  static const ProfileFunction s = sphere_profile();
  return s;
}

auto tesseral(int l, int k) {
  return [l, k](double t, double phi) { return assoc_legendre_norm(l, k, t) * std::polar(1.0, k * phi); };
}

double rel(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Integrate, ConstantOnEquatorArc) {
  const Geodesic g = latitude_arc(sphere(), Interval{0.0, pi / 3});
  const auto v = integrate_restriction([](double, double) { return 1.0; }, g, QuadratureSpec{}, 0.1);
  EXPECT_NEAR(v.real(), pi / 3, 1e-14);
  EXPECT_EQ(v.imag(), 0.0);
}

TEST(Integrate, ZonalOnEquatorMatchesClosedForm) {
  const Geodesic g = latitude_arc(sphere(), Interval{0.0, pi / 3});
  const int k = 100;
  const double norm = std::sqrt((2.0 * k + 1) / (4 * pi));
  const auto u = [&](double t, double) { return norm * legendre_P(k, t); };
  const double h = make_harmonic_index(k, 0).h;
  const double exact = pi / 3 * norm * legendre_P0(k);
  const auto v = integrate_restriction(u, g, QuadratureSpec{}, h);
  EXPECT_NEAR(v.real(), exact, 1e-10);
  EXPECT_NEAR(std::abs(exact), 0.334, 1e-3);
}

TEST(Integrate, ArcLengthOnPerturbedMeridian) {
  // density of the embedded meridian: integral of 1 is its length
  const ProfileFunction p = make_profile(ProfileKind::polynomial_perturbed, {1.0, 0.2});
  const Geodesic g = longitude_arc(p, Interval{-0.5, 0.7}, 0.0);
  const auto v = integrate_restriction([](double, double) { return 1.0; }, g, QuadratureSpec{}, 0.05);
  EXPECT_NEAR(v.real(), g.embedded_length(), 1e-12);
  // independent oracle: polyline length of the embedded curve (r, z) = (f(t), t)
  double len = 0.0;
  const int n = 200000;
  double pr = p.f(-0.5);
  double pz = -0.5;
  for (int i = 1; i <= n; ++i) {
    const double z = -0.5 + 1.2 * i / n;
    const double r = p.f(z);
    len += std::hypot(r - pr, z - pz);
    pr = r;
    pz = z;
  }
  EXPECT_NEAR(v.real(), len, 1e-9);
}

TEST(Integrate, TesseralStableUnderPanelDoubling) {
  const HarmonicIndex idx = make_harmonic_index(400, 200);
  const double theta0 = turning_points(idx).first;
  const Geodesic g = longitude_arc_by_angle(sphere(), Interval{theta0 - 0.3, theta0}, 0.0);
  const std::size_t n = panel_count(g, QuadratureSpec{}, idx.h);
  const auto a = integrate_panels(tesseral(400, 200), g, QuadratureSpec{}, n);
  const auto b = integrate_panels(tesseral(400, 200), g, QuadratureSpec{}, 2 * n);
  EXPECT_LT(std::abs(a - b), 1e-8 * std::abs(b));
}

TEST(Adaptive, SmoothIntegrand) {
  const Geodesic g = longitude_arc(sphere(), Interval{-0.3, 0.6}, 0.0);
  const auto r = integrate_adaptive([](double t, double) { return std::exp(t); }, g, QuadratureSpec{}, 0.5);
  EXPECT_LE(r.error_estimate, 1e-12);
  EXPECT_EQ(r.panels, 2 * panel_count(g, QuadratureSpec{}, 0.5));
}

TEST(Adaptive, ZonalAcrossOscillatoryRegion) {
  const int k = 500;
  const Geodesic g = longitude_arc(sphere(), Interval{-0.6, 0.7}, 0.0);
  const double norm = std::sqrt((2.0 * k + 1) / (4 * pi));
  const auto r = integrate_adaptive([&](double t, double) { return norm * legendre_P(k, t); }, g, QuadratureSpec{},
                                    make_harmonic_index(k, 0).h);
  EXPECT_LT(r.error_estimate, 1e-8 * std::abs(r.value) + 1e-14);
}

TEST(Adaptive, PanelLimit) {
  const Geodesic g = latitude_arc(sphere(), Interval{0.0, 1.0});
  QuadratureSpec spec;
  spec.max_panels = 100;
  try {
    integrate_adaptive([](double, double) { return 1.0; }, g, spec, 1e-4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::panel_limit);
  }
  EXPECT_THROW(integrate_restriction([](double, double) { return 1.0; }, g, QuadratureSpec{}, 1e-9), Error);
  EXPECT_THROW(integrate_restriction([](double, double) { return 1.0; }, g, QuadratureSpec{}, 0.0), Error);
}

TEST(Spec, Validation) {
  QuadratureSpec s;
  EXPECT_NO_THROW(s.validate());
  s.nodes_per_panel = 3;
  EXPECT_THROW(s.validate(), Error);
  s = {};
  s.panels_per_wavelength = 1.5;
  EXPECT_THROW(s.validate(), Error);
}

TEST(Spec, PanelsFollowWavelength) {
  const Geodesic g = latitude_arc(sphere(), Interval{0.0, 1.0});
  // panel length <= 2 pi h / 4
  EXPECT_EQ(panel_count(g, QuadratureSpec{}, 1.0 / (2 * pi)), 4u);
  EXPECT_EQ(panel_count(g, QuadratureSpec{}, 1.0 / (2 * pi) / 10), 40u);
}

TEST(Invariants, Linearity) {
  const HarmonicIndex idx = make_harmonic_index(60, 30);
  const Geodesic g = longitude_arc(sphere(), Interval{0.2, 0.9}, 0.3);
  const auto u = tesseral(60, 30);
  const auto v = [](double t, double phi) { return std::complex<double>(std::cos(40 * t), std::sin(phi + t)); };
  const std::complex<double> alpha(0.7, -1.3);
  const double beta = 2.5;
  const auto w = [&](double t, double phi) { return alpha * u(t, phi) + beta * v(t, phi); };
  const std::size_t n = panel_count(g, QuadratureSpec{}, idx.h);
  const auto iu = integrate_panels(u, g, QuadratureSpec{}, n);
  const auto iv = integrate_panels(v, g, QuadratureSpec{}, n);
  const auto iw = integrate_panels(w, g, QuadratureSpec{}, n);
  EXPECT_LT(rel(iw, alpha * iu + beta * iv), 1e-12);
}

TEST(Invariants, Additivity) {
  const HarmonicIndex idx = make_harmonic_index(80, 40);
  const auto u = tesseral(80, 40);
  const QuadratureSpec spec;
  for (const ProfileFunction& p : {sphere(), make_profile(ProfileKind::polynomial_perturbed, {1.0, 0.2})}) {
    const Geodesic whole = longitude_arc(p, Interval{-0.4, 0.8}, 0.0);
    const Geodesic left = longitude_arc(p, Interval{-0.4, 0.25}, 0.0);
    const Geodesic right = longitude_arc(p, Interval{0.25, 0.8}, 0.0);
    const auto a = integrate_adaptive(u, whole, spec, idx.h / 4).value;
    const auto b = integrate_adaptive(u, left, spec, idx.h / 4).value + integrate_adaptive(u, right, spec, idx.h / 4).value;
    EXPECT_LT(rel(a, b), 1e-12);
  }
  const Geodesic eq = latitude_arc(sphere(), Interval{0.0, 2.0});
  const auto e1 = integrate_adaptive(u, eq, spec, idx.h / 4).value;
  const auto e2 = integrate_adaptive(u, latitude_arc(sphere(), Interval{0.0, 0.7}), spec, idx.h / 4).value +
                  integrate_adaptive(u, latitude_arc(sphere(), Interval{0.7, 2.0}), spec, idx.h / 4).value;
  EXPECT_LT(rel(e1, e2), 1e-12);
}

TEST(Invariants, Conjugation) {
  const HarmonicIndex idx = make_harmonic_index(50, 20);
  const auto u = tesseral(50, 20);
  const auto ubar = [&](double t, double phi) { return std::conj(u(t, phi)); };
  for (const Geodesic& g : {latitude_arc(sphere(), Interval{0.1, 1.4}), longitude_arc(sphere(), Interval{0.1, 0.9}, 0.8)}) {
    const std::size_t n = panel_count(g, QuadratureSpec{}, idx.h);
    EXPECT_EQ(integrate_panels(ubar, g, QuadratureSpec{}, n), std::conj(integrate_panels(u, g, QuadratureSpec{}, n)));
  }
}

TEST(Invariants, SpectralConvergence) {
  const Geodesic g = latitude_arc(sphere(), Interval{0.0, 2.0});
  // e^{i m phi} on the equator: closed form (e^{2im} - 1) / (i m)
  const double m = 37.0;
  const auto u = [m](double, double phi) { return std::polar(1.0, m * phi); };
  const std::complex<double> exact = (std::polar(1.0, 2 * m) - 1.0) / std::complex<double>(0.0, m);
  QuadratureSpec spec;
  spec.nodes_per_panel = 4;
  double prev = INFINITY;
  int improvements = 0;
  for (std::size_t panels : {4u, 8u, 16u, 32u}) {
    const double err = std::abs(integrate_panels(u, g, spec, panels) - exact);
    // 4-point Gauss is order 8: halving the panel length gains at least 2^6
    if (std::isfinite(prev) && err > 1e-15) {
      EXPECT_LT(err, prev / 64.0);
      ++improvements;
    }
    prev = err;
  }
  EXPECT_GE(improvements, 2);
}

TEST(Invariants, BitStableForFixedPanels) {
  const HarmonicIndex idx = make_harmonic_index(200, 100);
  const Geodesic g = longitude_arc_by_angle(sphere(), Interval{0.2, 0.5}, 0.0);
  const auto a = integrate_restriction(tesseral(200, 100), g, QuadratureSpec{}, idx.h);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(integrate_restriction(tesseral(200, 100), g, QuadratureSpec{}, idx.h), a);
}

TEST(Quadrature, PairwiseSumIsAccurate) {
  std::vector<double> xs(1 << 20, 0.1);
  EXPECT_NEAR(pairwise_sum(std::span<const double>(xs)), 0.1 * (1 << 20), 1e-9);
}
