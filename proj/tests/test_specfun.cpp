#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qcigeo/quadrature.hpp"
#include "qcigeo/specfun.hpp"

using namespace qcigeo;

namespace {

constexpr double pi = std::numbers::pi;

// 2 pi int_{-1}^{1} N_l^k N_m^k dx by Gauss-Legendre, exact for these degrees.
double overlap(int l, int m, int k) {
  const GaussLegendreRule rule = gauss_legendre(static_cast<std::size_t>(std::max(l, m) + 20));
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * assoc_legendre_norm(l, k, rule.nodes[i]) * assoc_legendre_norm(m, k, rule.nodes[i]);
  return 2.0 * pi * s;
}

}  // namespace

TEST(HarmonicIndexTest, SemiclassicalParameter) {
  for (int l : {1, 2, 10, 400, 4000}) {
    const HarmonicIndex idx = make_harmonic_index(l, l / 2);
    EXPECT_NEAR(idx.h * std::sqrt(l * (l + 1.0)), 1.0, 1e-14);
  }
  EXPECT_TRUE(std::isinf(make_harmonic_index(0, 0).h));
  EXPECT_THROW(make_harmonic_index(3, 4), Error);
  EXPECT_THROW(make_harmonic_index(-1, 0), Error);
}

TEST(Legendre, SmallDegrees) {
  for (double x : {-1.0, -0.4, 0.0, 0.3, 1.0}) EXPECT_EQ(legendre_P(0, x), 1.0);
  const double x = 0.3;
  EXPECT_NEAR(legendre_P(5, x), (63 * std::pow(x, 5) - 70 * std::pow(x, 3) + 15 * x) / 8, 1e-15);
  EXPECT_NEAR(legendre_P(5, 0.3), 0.34538625, 1e-15);
  EXPECT_NEAR(legendre_P(4, 0.0), 0.375, 1e-15);
  EXPECT_NEAR(legendre_P(2, 0.0), -0.5, 1e-15);
}

TEST(Legendre, MatchesStandardLibrary) {
  for (int k : {1, 7, 50, 333, 1000})
    for (double x : {-0.99, -0.5, 0.01, 0.42, 0.87})
      EXPECT_NEAR(legendre_P(k, x), std::legendre(k, x), 1e-12) << k << " " << x;
}

TEST(Legendre, BoundedByOne) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-1.0, 1.0);
  std::uniform_int_distribution<int> uk(0, 2000);
  for (int i = 0; i < 1000; ++i) EXPECT_LE(std::abs(legendre_P(uk(rng), ux(rng))), 1.0 + 1e-12);
  EXPECT_NEAR(legendre_P(2000, 1.0), 1.0, 1e-12);
}

TEST(Legendre, Parity) {
  for (int k : {0, 1, 2, 9, 100, 555})
    for (double x : {0.1, 0.5, 0.77}) {
      const double sign = k % 2 ? -1.0 : 1.0;
      EXPECT_NEAR(legendre_P(k, -x), sign * legendre_P(k, x), 1e-12);
    }
}

TEST(Legendre, RejectsOutsideInterval) { EXPECT_THROW(legendre_P(3, 1.5), Error); }

TEST(LegendreAtZero, ClosedForm) {
  EXPECT_NEAR(legendre_P0(2), -0.5, 1e-15);
  EXPECT_NEAR(legendre_P0(4), 0.375, 1e-15);
  EXPECT_EQ(legendre_P0(1), 0.0);
  EXPECT_EQ(legendre_P0(101), 0.0);
  EXPECT_EQ(legendre_P0(0), 1.0);
  for (int k : {10, 100, 1000}) EXPECT_NEAR(legendre_P0(k), legendre_P(k, 0.0), 1e-13);
}

TEST(LegendreAtZero, Asymptotic) {
  const double exact = std::abs(legendre_P0(100));
  const double asym = std::sqrt(2.0 / (100 * pi));
  EXPECT_NEAR(exact, std::abs(std::legendre(100, 0.0)), 1e-14);
  EXPECT_LT(std::abs(exact - asym) / asym, 0.01);
}

TEST(AssocLegendre, ConstantMode) {
  for (double x : {-1.0, 0.0, 0.5, 1.0}) EXPECT_NEAR(assoc_legendre_norm(0, 0, x), 0.28209479177387814, 1e-15);
}

TEST(AssocLegendre, ClosedForms) {
  EXPECT_NEAR(std::abs(assoc_legendre_norm(2, 2, 0.0)), std::sqrt(15.0 / (32.0 * pi)), 1e-15);
  EXPECT_NEAR(assoc_legendre_norm(2, 2, 0.0), 0.38627420202318957, 1e-15);
  for (double x : {-0.7, 0.2, 0.9}) {
    EXPECT_NEAR(assoc_legendre_norm(1, 1, x), std::sqrt(3.0 / (8.0 * pi)) * std::sqrt(1 - x * x), 1e-15);
    EXPECT_NEAR(assoc_legendre_norm(3, 2, x), std::sqrt(105.0 / (32.0 * pi)) * x * (1 - x * x), 1e-14);
    EXPECT_NEAR(assoc_legendre_norm(2, 0, x), std::sqrt(5.0 / (4.0 * pi)) * (3 * x * x - 1) / 2, 1e-15);
  }
}

TEST(AssocLegendre, MatchesStandardLibraryUpToPhase) {
  for (int l : {4, 20, 40, 90})
    for (int k : {0, 1, l / 3, l / 2, l})
      for (double th : {0.3, 1.0, 1.5707963267948966, 2.4}) {
        const double phase = k % 2 ? -1.0 : 1.0;
        EXPECT_NEAR(assoc_legendre_norm(l, k, std::cos(th)), phase * std::sph_legendre(l, k, th), 1e-12)
            << l << "," << k << " at " << th;
      }
}

TEST(AssocLegendre, PolesAndPositivity) {
  EXPECT_EQ(assoc_legendre_norm(10, 3, 1.0), 0.0);
  EXPECT_EQ(assoc_legendre_norm(10, 3, -1.0), 0.0);
  EXPECT_NEAR(assoc_legendre_norm(10, 0, 1.0), std::sqrt(21.0 / (4.0 * pi)), 1e-13);
  for (int l : {5, 50, 500}) EXPECT_GT(assoc_legendre_norm(l, l / 2, 0.99), 0.0);
  // (1 - x^2)^(k/2) below the double range underflows to zero, never to NaN
  EXPECT_EQ(assoc_legendre_norm(500, 250, 0.9999), 0.0);
}

TEST(AssocLegendre, Normalisation) { EXPECT_NEAR(overlap(200, 200, 100), 1.0, 1e-8); }

TEST(AssocLegendre, DiscreteOrthonormality) {
  for (int l : {100, 102, 200})
    for (int m : {100, 102, 200}) EXPECT_NEAR(overlap(l, m, 50), l == m ? 1.0 : 0.0, 1e-7) << l << " " << m;
}

TEST(AssocLegendre, HighDegreeStaysFinite) {
  const int l = 4000;
  const int k = 2000;
  double peak = 0.0;
  for (int i = 1; i < 400; ++i) {
    const double th = pi * i / 400.0;
    const double v = assoc_legendre_norm(l, k, std::cos(th));
    ASSERT_TRUE(std::isfinite(v));
    peak = std::max(peak, std::abs(v));
    // oscillatory band: sin(theta) comfortably above k h ~ 1/2
    if (std::sin(th) > 0.6) {
      EXPECT_GT(std::abs(v) + std::abs(assoc_legendre_norm(l, k, std::cos(th + 1e-3))), 0.0);
    }
  }
  EXPECT_GT(peak, 0.1);
  EXPECT_NEAR(overlap(l, l, k), 1.0, 1e-7);
  // forbidden region: |N| decays monotonically towards the pole, reaching tiny
  // representable values before it underflows
  const double theta0 = turning_points(make_harmonic_index(l, k)).first;
  double prev = std::abs(assoc_legendre_norm(l, k, std::cos(theta0 - 0.02)));
  bool tiny_seen = false;
  for (double th = theta0 - 0.03; th > 0.01; th -= 0.01) {
    const double v = std::abs(assoc_legendre_norm(l, k, std::cos(th)));
    ASSERT_TRUE(std::isfinite(v));
    EXPECT_LE(v, prev);
    if (v > 0.0 && v < 1e-100) tiny_seen = true;
    prev = v;
  }
  EXPECT_TRUE(tiny_seen);
  EXPECT_EQ(prev, 0.0);
}

TEST(AssocLegendre, IndexErrors) {
  EXPECT_THROW(assoc_legendre_norm(3, 4, 0.0), Error);
  EXPECT_THROW(assoc_legendre_norm(3, 1, 1.1), Error);
}

TEST(Szego, RemainderBound) {
  for (int k : {200, 500, 1000, 2000})
    for (double th : {pi / 3, pi / 2, 2 * pi / 3})
      EXPECT_LE(std::abs(legendre_P(k, std::cos(th)) - szego_main_term(k, th)), 5.0 * std::pow(k, -1.5))
          << k << " " << th;
}

TEST(Szego, RejectsNearPoles) {
  EXPECT_THROW(szego_main_term(100, 0.01), Error);
  EXPECT_THROW(szego_main_term(100, pi - 0.01), Error);
  EXPECT_NO_THROW(szego_main_term(100, 0.2));
}

TEST(TurningPoints, TesseralFamily) {
  for (int k : {100, 1000, 100000}) {
    const auto [th0, th1] = turning_points(make_harmonic_index(2 * k, k));
    EXPECT_NEAR(std::sin(th0), k / std::sqrt(2.0 * k * (2.0 * k + 1.0)), 1e-14);
    EXPECT_NEAR(th1, pi - th0, 1e-15);
  }
  const auto [far0, far1] = turning_points(make_harmonic_index(2'000'000, 1'000'000));
  EXPECT_NEAR(far0, pi / 6, 1e-6);
  (void)far1;
}

TEST(TurningPoints, SectoralAndSmallK) {
  const int l = 50;
  const auto [th0, th1] = turning_points(make_harmonic_index(l, l));
  EXPECT_NEAR(std::sin(th0), l / std::sqrt(l * (l + 1.0)), 1e-14);
  EXPECT_LT(th1 - th0, 0.5);

  const HarmonicIndex idx = make_harmonic_index(1'000'000, 1);
  EXPECT_NEAR(turning_points(idx).first, idx.h, 1e-15);
  EXPECT_THROW(turning_points(make_harmonic_index(5, 0)), Error);
}
