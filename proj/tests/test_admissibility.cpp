#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qcigeo/admissibility.hpp"
#include "qcigeo/json_io.hpp"

using namespace qcigeo;

namespace {

constexpr double pi = std::numbers::pi;

const ProfileFunction& sphere() {
  static const ProfileFunction s = sphere_profile();
  return s;
}

Geodesic case1() { return latitude_arc(sphere(), Interval{0.0, pi / 3}); }
Geodesic case2() { return longitude_arc(sphere(), Interval{0.3, 0.8}, 0.0); }
Geodesic straddling() { return longitude_arc(sphere(), Interval{-0.2, 0.2}, 0.0); }

MomentMap dsl_map(const ProfileFunction& p, const std::string& p1, const std::string& p2) {
  return make_moment_map(p, p1, p2);
}

// Independent evaluation of min |f'(t) sqrt(E1) sin(sigma)| over the band on
// the same (tau, sigma) lattice as the checker.
double closed_form_min(const ProfileFunction& p, Interval t_range, double E1, double E2, double eps,
                       std::size_t n_tau, std::size_t n_fiber) {
  std::vector<double> ts;
  for (std::size_t i = 0; i < n_tau; ++i)
    ts.push_back(t_range.lo + t_range.length() * static_cast<double>(i) / static_cast<double>(n_tau - 1));
  ts.back() = t_range.hi;
  if (t_range.lo < p.t0() && p.t0() < t_range.hi) ts.push_back(p.t0());
  double best = INFINITY;
  for (double t : ts)
    for (std::size_t j = 0; j < n_fiber; ++j) {
      const double sigma = 2 * pi * static_cast<double>(j) / static_cast<double>(n_fiber);
      const double p2 = std::sqrt(E1) * p.f(t) * std::sin(sigma);
      if (std::abs(p2 - E2) < eps) best = std::min(best, std::abs(p.fp(t) * std::sqrt(E1) * std::sin(sigma)));
    }
  return best;
}

}  // namespace

TEST(Fiber, UnitCircleAtEquator) {
  const auto pts = fiber_points(builtin_moment_map(sphere()), {0.0, 0.0}, 1.0, 4);
  ASSERT_EQ(pts.size(), 4u);
  const double expected[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(pts[i].xi_t, expected[i][0], 1e-15);
    EXPECT_NEAR(pts[i].xi_phi, expected[i][1], 1e-15);
  }
}

TEST(Fiber, EllipseAxesAwayFromEquator) {
  const auto pts = fiber_points(builtin_moment_map(sphere()), {0.6, 0.0}, 1.0, 64);
  double max_t = 0.0;
  double max_phi = 0.0;
  for (const auto& p : pts) {
    max_t = std::max(max_t, std::abs(p.xi_t));
    max_phi = std::max(max_phi, std::abs(p.xi_phi));
  }
  EXPECT_NEAR(max_t, 1.0, 1e-15);
  EXPECT_NEAR(max_phi, 0.8, 1e-15);
}

TEST(Fiber, NegativeEnergyIsEmpty) {
  for (const MomentMap& m : {builtin_moment_map(sphere()),
                             dsl_map(sphere(), "xi_t^2 + xi_phi^2 / f(t)^2", "xi_phi")}) {
    try {
      fiber_points(m, {0.0, 0.0}, -1.0, 16);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::empty_fiber);
    }
  }
}

TEST(Fiber, ResidualBelowTolerance) {
  const ProfileFunction tilted = make_profile(ProfileKind::polynomial_perturbed, {1.0, 0.2});
  const std::vector<MomentMap> maps = {
      builtin_moment_map(tilted), dsl_map(tilted, "xi_t^2 + xi_phi^2 / f(t)^2", "xi_phi"),
      dsl_map(tilted, "xi_t^2 + 2 * xi_phi^2 + xi_t * xi_phi / 4", "xi_phi"),
      dsl_map(tilted, "xi_t^4 + xi_phi^2", "xi_phi")};
  for (const MomentMap& m : maps)
    for (double t : {-0.8, 0.0, 0.35, 0.9})
      for (double E1 : {0.25, 1.0, 7.5}) {
        const auto pts = fiber_points(m, {t, 0.3}, E1, 48);
        EXPECT_EQ(pts.size(), 48u);
        for (const auto& p : pts) EXPECT_LE(std::abs(m.eval_p1({t, 0.3, p.xi_t, p.xi_phi}) - E1), 1e-10);
      }
}

TEST(Fiber, RequiresEnoughAngles) {
  EXPECT_THROW(fiber_points(builtin_moment_map(sphere()), {0.0, 0.0}, 1.0, 3), Error);
}

TEST(PrincipalType, BuiltinAlwaysHolds) {
  const MomentMap m = builtin_moment_map(sphere());
  EXPECT_TRUE(check_principal_type(m, case1(), 1.0));
  EXPECT_TRUE(check_principal_type(m, case2(), 1.0));
  EXPECT_TRUE(check_principal_type(m, straddling(), 2.0, {32, 32}));
}

TEST(PrincipalType, DegenerateInXiPhiStillHolds) {
  EXPECT_TRUE(check_principal_type(dsl_map(sphere(), "xi_t^2", "xi_phi"), case2(), 1.0, {32, 32}));
}

TEST(PrincipalType, CriticalLevelFails) {
  const MomentMap m = dsl_map(sphere(), "(xi_t^2 + xi_phi^2 - 1)^2", "xi_phi");
  // the level set E1 = 0 is the unit circle, where the gradient vanishes
  const auto pts = fiber_points(m, {0.1, 0.0}, 0.0, 16);
  for (const auto& p : pts) EXPECT_NEAR(std::hypot(p.xi_t, p.xi_phi), 1.0, 1e-4);
  EXPECT_FALSE(check_principal_type(m, case2(), 0.0, {32, 32}));
}

TEST(Admissible, Case1EquatorIsNotAdmissible) {
  const AdmissibilityReport r = check_admissible(builtin_moment_map(sphere()), case1(), {1.0, 0.0, 0.1});
  EXPECT_EQ(r.verdict, Verdict::not_admissible);
  EXPECT_LE(r.min_derivative, 1e-8);
  EXPECT_TRUE(r.principal_type_ok);
  EXPECT_GT(r.band_points, 0u);
  EXPECT_EQ(r.grid.n_tau, 128u);
  EXPECT_EQ(r.grid.n_fiber, 128u);
}

TEST(Admissible, Case2LongitudeAboveT0IsAdmissible) {
  const AdmissibilityReport r = check_admissible(builtin_moment_map(sphere()), case2(), {1.0, 0.5, 0.05});
  EXPECT_EQ(r.verdict, Verdict::admissible);
  EXPECT_GE(r.min_derivative, 0.1);
  // witness lies on C_gamma and in the band
  EXPECT_NEAR(r.witness.point.xi_t * r.witness.point.xi_t +
                  r.witness.point.xi_phi * r.witness.point.xi_phi / (1 - r.witness.point.t * r.witness.point.t),
              1.0, 1e-12);
  EXPECT_LT(std::abs(r.witness.point.xi_phi - 0.5), 0.05);
}

TEST(Admissible, MirrorBelowT0IsAdmissible) {
  const Geodesic g = longitude_arc(sphere(), Interval{-0.8, -0.3}, 1.0);
  EXPECT_EQ(check_admissible(builtin_moment_map(sphere()), g, {1.0, 0.5, 0.05}).verdict, Verdict::admissible);
}

TEST(Admissible, StraddlingT0IsNotAdmissible) {
  const MomentMap m = builtin_moment_map(sphere());
  for (auto eps : {std::optional<double>{}, std::optional<double>{0.05}}) {
    const AdmissibilityReport r = check_admissible(m, straddling(), {1.0, 0.5, eps});
    EXPECT_EQ(r.verdict, Verdict::not_admissible);
    EXPECT_LE(r.min_derivative, 1e-8);
    EXPECT_NEAR(r.witness.point.t, 0.0, 1e-15);
  }
}

TEST(Admissible, EmptyBand) {
  const AdmissibilityReport r = check_admissible(builtin_moment_map(sphere()), case2(), {1.0, 5.0, 0.05});
  EXPECT_EQ(r.verdict, Verdict::empty_band);
  EXPECT_EQ(r.band_points, 0u);
}

TEST(Admissible, RejectsCoarseGridAndBadThreshold) {
  const MomentMap m = builtin_moment_map(sphere());
  EXPECT_THROW(check_admissible(m, case2(), {1.0, 0.5, 0.05}, {16, 128}), Error);
  EXPECT_THROW(check_admissible(m, case2(), {1.0, 0.5, 0.05}, {128, 16}), Error);
  EXPECT_THROW(check_admissible(m, case2(), {1.0, 0.5, 0.05}, {}, 0.0), Error);
  EXPECT_THROW(check_admissible(m, case2(), {1.0, 0.5, -0.1}), Error);
}

TEST(Admissible, DerivativeMatchesClosedForm) {
  for (const ProfileFunction& p : {sphere(), make_profile(ProfileKind::polynomial_perturbed, {1.0, 0.2})}) {
    for (auto [a, b, E1, E2] : {std::tuple{0.3, 0.8, 1.0, 0.5}, std::tuple{-0.9, -0.2, 2.0, -0.4},
                                std::tuple{0.1, 0.95, 0.5, 0.2}}) {
      const Geodesic g = longitude_arc(p, Interval{a, b}, 0.0);
      const AdmissibilityReport r = check_admissible(builtin_moment_map(p), g, {E1, E2, 0.05}, {64, 64});
      const double oracle = closed_form_min(p, Interval{a, b}, E1, E2, 0.05, 64, 64);
      EXPECT_NEAR(r.min_derivative, oracle, 1e-6) << a << " " << b;
    }
  }
}

TEST(Admissible, ScalingCovariance) {
  for (double c : {0.5, 2.5, 10.0}) {
    for (const Geodesic& g : {case2(), longitude_arc(sphere(), Interval{-0.7, -0.1}, 0.0)}) {
      const MomentMap base = builtin_moment_map(sphere());
      const MomentMap scaled = make_moment_map(sphere(), std::nullopt, std::to_string(c) + " * xi_phi");
      const AdmissibilityReport r0 = check_admissible(base, g, {1.0, 0.5, 0.05}, {64, 64});
      const AdmissibilityReport r1 = check_admissible(scaled, g, {1.0, 0.5 * c, 0.05 * c}, {64, 64});
      EXPECT_NEAR(r1.min_derivative, c * r0.min_derivative, 1e-8 * c * r0.min_derivative);
      EXPECT_EQ(r0.verdict, r1.verdict);
      EXPECT_EQ(r0.band_points, r1.band_points);
    }
  }
}

TEST(Admissible, GridRefinement) {
  const MomentMap m = builtin_moment_map(sphere());
  const AdmissibilityReport c1 = check_admissible(m, case1(), {1.0, 0.0, 0.1}, {64, 64});
  const AdmissibilityReport c1f = check_admissible(m, case1(), {1.0, 0.0, 0.1}, {128, 128});
  EXPECT_EQ(c1.verdict, Verdict::not_admissible);
  EXPECT_EQ(c1f.verdict, Verdict::not_admissible);
  EXPECT_EQ(c1.min_derivative, 0.0);
  EXPECT_EQ(c1f.min_derivative, 0.0);

  const AdmissibilityReport c2 = check_admissible(m, case2(), {1.0, 0.5, 0.05}, {128, 128});
  const AdmissibilityReport c2f = check_admissible(m, case2(), {1.0, 0.5, 0.05}, {256, 256});
  EXPECT_LT(std::abs(c2f.min_derivative - c2.min_derivative), 0.1 * c2.min_derivative);
}

TEST(Admissible, DslVerdictsMatchBuiltin) {
  const MomentMap builtin = builtin_moment_map(sphere());
  const MomentMap parsed = dsl_map(sphere(), "xi_t^2 + xi_phi^2 / f(t)^2", "xi_phi");
  for (auto [g, E] : {std::pair{case1(), EnergyPair{1.0, 0.0, 0.1}}, std::pair{case2(), EnergyPair{1.0, 0.5, 0.05}},
                      std::pair{straddling(), EnergyPair{1.0, 0.5, 0.05}}}) {
    const auto a = check_admissible(builtin, g, E);
    const auto b = check_admissible(parsed, g, E);
    EXPECT_EQ(a.verdict, b.verdict);
    EXPECT_EQ(a.principal_type_ok, b.principal_type_ok);
  }
}

TEST(Admissible, PerturbedProfileCases) {
  const ProfileFunction p = make_profile(ProfileKind::polynomial_perturbed, {1.0, 0.2});
  const MomentMap m = builtin_moment_map(p);
  EXPECT_EQ(check_admissible(m, latitude_arc(p, Interval{0.0, 2.0}), {1.0, 0.0, 0.1}).verdict,
            Verdict::not_admissible);
  EXPECT_EQ(check_admissible(m, longitude_arc(p, Interval{p.t0() + 0.2, 0.8}, 0.0), {1.0, 0.5, 0.05}).verdict,
            Verdict::admissible);
  EXPECT_EQ(check_admissible(m, longitude_arc(p, Interval{p.t0() - 0.2, p.t0() + 0.2}, 0.0), {1.0, 0.5, 0.05})
                .verdict,
            Verdict::not_admissible);
}

TEST(Admissible, ReportJson) {
  const AdmissibilityReport r = check_admissible(builtin_moment_map(sphere()), case1(), {1.0, 0.0, 0.1});
  const json j = admissibility_to_json(r);
  EXPECT_EQ(j["verdict"], "not-admissible");
  EXPECT_EQ(j["grid"]["n_tau"], 128);
  EXPECT_TRUE(j["principal_type_ok"].get<bool>());
  EXPECT_TRUE(j["witness"].contains("xi_phi"));
}
