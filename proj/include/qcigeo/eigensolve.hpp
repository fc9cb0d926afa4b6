#pragma once

// Joint eigenfunctions u = w(theta) e^{ik phi} of the Laplacian on the embedded
// surface of revolution. In the polar angle theta (t = cos theta) the metric is
// a(theta)^2 dtheta^2 + F(theta)^2 dphi^2 and
//
//   -(F/a w')' + k^2 a/F w = lambda a F w,
//
// a singular Sturm-Liouville problem (F vanishes at both poles). It is
// discretised by cell-centred finite volumes on N cells of [0, pi]; the pole
// faces carry zero flux. Scaling by the diagonal mass a F gives a symmetric
// tridiagonal matrix.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qcigeo/error.hpp"
#include "qcigeo/geometry.hpp"
#include "qcigeo/quadrature.hpp"
#include "qcigeo/tridiagonal.hpp"

namespace qcigeo {

/// Discretised radial operator for one angular mode k.
struct RadialOperator {
  SymmetricTridiagonal matrix;
  std::vector<double> theta;    ///< cell centres
  std::vector<double> density;  ///< area density a F at the centres
  double step = 0.0;
  int k = 0;
  ProfileFunction profile;
};

/// Eigenpair of the discrete operator; `values` are samples of w at the cell
/// centres with 2 pi step sum(density w^2) = 1.
struct RadialEigenpair {
  double lambda = 0.0;
  std::vector<double> values;
};

namespace detail {

inline RadialOperator assemble_unchecked(const ProfileFunction& profile, int k, std::size_t n) {
  const double step = std::numbers::pi / static_cast<double>(n);
  const double kk = static_cast<double>(k);
  RadialOperator op{{}, std::vector<double>(n), std::vector<double>(n), step, k, profile};

  std::vector<double> flux(n + 1, 0.0);  // F/a at faces; zero at the poles
  for (std::size_t j = 1; j < n; ++j) {
    const double th = step * static_cast<double>(j);
    flux[j] = profile.radius_at_angle(th) / profile.meridian_speed_angle(th);
  }
  std::vector<double> stiff_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = step * (static_cast<double>(i) + 0.5);
    const double radius = profile.radius_at_angle(th);
    const double speed = profile.meridian_speed_angle(th);
    op.theta[i] = th;
    op.density[i] = speed * radius;
    stiff_diag[i] = (flux[i] + flux[i + 1]) / (step * step) + kk * kk * speed / radius;
  }
  op.matrix.diag.resize(n);
  op.matrix.off.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) op.matrix.diag[i] = stiff_diag[i] / op.density[i];
  for (std::size_t i = 0; i + 1 < n; ++i)
    op.matrix.off[i] = -flux[i + 1] / (step * step * std::sqrt(op.density[i] * op.density[i + 1]));
  return op;
}

// Back-transform v -> w = v / sqrt(density), unit area norm, and fix the sign
// so the first sample above 1e-3 of the maximum is positive.
inline std::vector<double> radial_from_vector(const RadialOperator& op, std::span<const double> v) {
  std::vector<double> w(v.size());
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  const double scale = 1.0 / std::sqrt(2.0 * std::numbers::pi * op.step * norm2);
  double peak = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    w[i] = v[i] * scale / std::sqrt(op.density[i]);
    peak = std::max(peak, std::abs(w[i]));
  }
  for (double x : w) {
    if (std::abs(x) > 1e-3 * peak) {
      if (x < 0.0)
        for (double& y : w) y = -y;
      break;
    }
  }
  return w;
}

}  // namespace detail

/// Assembles the radial operator; requires N >= 256 and N >= 20 k.
inline RadialOperator assemble_operator(const ProfileFunction& profile, int k, std::size_t n) {
  if (k < 0) throw Error(ErrorKind::invalid_argument, "angular mode k must be >= 0");
  if (n < 256) throw Error(ErrorKind::invalid_argument, "grid size N must be >= 256");
  if (n < 20 * static_cast<std::size_t>(k))
    throw Error(ErrorKind::invalid_argument, "grid too coarse: need N >= 20 k (N = " +
                                                 std::to_string(n) + ", k = " + std::to_string(k) + ")");
  return detail::assemble_unchecked(profile, k, n);
}

inline RadialEigenpair eigenpair(const RadialOperator& op, std::size_t index) {
  const double lambda = bisect_eigenvalue(op.matrix, index);
  const std::vector<double> v = inverse_iteration(op.matrix, lambda, index);
  return {lambda, detail::radial_from_vector(op, v)};
}

/// First m eigenpairs in ascending order; m <= N/4.
inline std::vector<RadialEigenpair> eigenpairs(const RadialOperator& op, std::size_t m) {
  const std::size_t n = op.matrix.size();
  if (m == 0 || m > n / 4)
    throw Error(ErrorKind::invalid_argument, "eigenpair count must be in [1, N/4]");
  std::vector<double> lambdas(m);
  for (std::size_t j = 0; j < m; ++j) lambdas[j] = bisect_eigenvalue(op.matrix, j);

  const double cluster_gap = 1e-10 * std::max(1.0, op.matrix.norm_inf());
  std::vector<std::vector<double>> vectors;
  std::vector<RadialEigenpair> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::vector<double>> against;
    for (std::size_t i = j; i-- > 0 && lambdas[j] - lambdas[i] < cluster_gap;)
      against.push_back(vectors[i]);
    vectors.push_back(inverse_iteration(op.matrix, lambdas[j], j, against));
    out.push_back({lambdas[j], detail::radial_from_vector(op, vectors.back())});
  }
  return out;
}

/// L^2-normalised joint eigenfunction w(theta) e^{ik phi}. Eigenvalue and
/// radial samples are Richardson-extrapolated from grids N and N/2.
class JointEigenfunction {
 public:
  int k() const noexcept { return k_; }
  std::size_t l_index() const noexcept { return l_index_; }
  double lambda() const noexcept { return lambda_; }
  /// h = lambda^{-1/2}
  double h() const noexcept {
    return lambda_ > 0.0 ? 1.0 / std::sqrt(lambda_) : std::numeric_limits<double>::infinity();
  }
  const ProfileFunction& profile() const noexcept { return profile_; }
  const std::vector<double>& theta_grid() const noexcept { return theta_; }
  const std::vector<double>& radial_values() const noexcept { return values_; }
  /// Sample positions in the t chart (t = cos theta), descending.
  std::vector<double> radial_grid() const {
    std::vector<double> t(theta_.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = t_from_angle(theta_[i]);
    return t;
  }

  /// Cubic (4-point Lagrange) interpolation in theta; samples beyond the
  /// poles come from the parity w(-theta) = (-1)^k w(theta).
  double radial_at_angle(double theta) const noexcept {
    const double u = theta / step_ - 0.5;
    const auto n = static_cast<long>(values_.size());
    long i = static_cast<long>(std::floor(u));
    if (i < 0) i = 0;
    if (i > n - 2) i = n - 2;
    const double s = u - static_cast<double>(i);
    const double y0 = sample(i - 1);
    const double y1 = sample(i);
    const double y2 = sample(i + 1);
    const double y3 = sample(i + 2);
    return -s * (s - 1.0) * (s - 2.0) / 6.0 * y0 + (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0 * y1 -
           (s + 1.0) * s * (s - 2.0) / 2.0 * y2 + (s + 1.0) * s * (s - 1.0) / 6.0 * y3;
  }

  std::complex<double> value(double t, double phi) const {
    if (!(t > -1.0 && t < 1.0))
      throw Error(ErrorKind::out_of_range, "eigenfunction evaluated outside (-1, 1): t = " + std::to_string(t));
    return radial_at_angle(angle_from_t(t)) * std::polar(1.0, static_cast<double>(k_) * phi);
  }

  /// L^2 norm over the surface, by Gauss-Legendre on each interpolation cell.
  double l2_norm() const {
    static const GaussLegendreRule rule = gauss_legendre(6);
    std::vector<double> breaks;
    breaks.push_back(0.0);
    for (double th : theta_) breaks.push_back(th);
    breaks.push_back(std::numbers::pi);
    std::vector<double> pieces;
    pieces.reserve(breaks.size() - 1);
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
      pieces.push_back(composite_gauss(
          [this](double th) {
            const double w = radial_at_angle(th);
            return w * w * profile_.meridian_speed_angle(th) * profile_.radius_at_angle(th);
          },
          breaks[j], breaks[j + 1], 1, rule));
    }
    return std::sqrt(2.0 * std::numbers::pi * pairwise_sum(std::span<const double>(pieces)));
  }

  friend JointEigenfunction solve_joint_eigenfunction(const ProfileFunction&, int, std::size_t,
                                                      std::size_t);

 private:
  JointEigenfunction(int k, std::size_t l_index, double lambda, double step,
                     std::vector<double> theta, std::vector<double> values, ProfileFunction profile)
      : k_(k), l_index_(l_index), lambda_(lambda), step_(step), theta_(std::move(theta)),
        values_(std::move(values)), profile_(std::move(profile)) {}

  double sample(long j) const noexcept {
    const auto n = static_cast<long>(values_.size());
    const double parity = (k_ % 2 == 0) ? 1.0 : -1.0;
    if (j < 0) return parity * values_[static_cast<std::size_t>(-j - 1)];
    if (j >= n) return parity * values_[static_cast<std::size_t>(2 * n - 1 - j)];
    return values_[static_cast<std::size_t>(j)];
  }

  int k_;
  std::size_t l_index_;
  double lambda_;
  double step_;
  std::vector<double> theta_;
  std::vector<double> values_;
  ProfileFunction profile_;
};

/// The l_index-th joint eigenfunction of angular mode k (on the sphere,
/// degree l = l_index + k). N must be even; the N/2 companion solve feeds
/// Richardson extrapolation of both eigenvalue and samples.
inline JointEigenfunction solve_joint_eigenfunction(const ProfileFunction& profile, int k,
                                                    std::size_t l_index, std::size_t n) {
  if (n % 2 != 0) throw Error(ErrorKind::invalid_argument, "grid size N must be even");
  const RadialOperator fine = assemble_operator(profile, k, n);
  if (l_index >= n / 4)
    throw Error(ErrorKind::invalid_argument, "radial index must be below N/4");
  const RadialOperator coarse = detail::assemble_unchecked(profile, k, n / 2);
  const RadialEigenpair pf = eigenpair(fine, l_index);
  const RadialEigenpair pc = eigenpair(coarse, l_index);

  // coarse samples interpolated onto the fine centres
  const JointEigenfunction coarse_fn(k, l_index, pc.lambda, coarse.step, coarse.theta, pc.values, profile);
  std::vector<double> coarse_on_fine(n);
  double overlap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    coarse_on_fine[i] = coarse_fn.radial_at_angle(fine.theta[i]);
    overlap += coarse_on_fine[i] * pf.values[i] * fine.density[i];
  }
  const double sign = overlap < 0.0 ? -1.0 : 1.0;
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = (4.0 * pf.values[i] - sign * coarse_on_fine[i]) / 3.0;
  const double lambda = (4.0 * pf.lambda - pc.lambda) / 3.0;
  JointEigenfunction u(k, l_index, lambda, fine.step, fine.theta, std::move(values), profile);
  const double norm = u.l2_norm();
  for (double& v : u.values_) v /= norm;
  return u;
}

inline std::vector<JointEigenfunction> solve_joint_eigenfunctions(const ProfileFunction& profile,
                                                                  int k, std::size_t count,
                                                                  std::size_t n) {
  std::vector<JointEigenfunction> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) out.push_back(solve_joint_eigenfunction(profile, k, j, n));
  return out;
}

inline std::complex<double> eigenfunction_value(const JointEigenfunction& u, double t, double phi) {
  return u.value(t, phi);
}

}  // namespace qcigeo
