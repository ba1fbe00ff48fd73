#pragma once

// Closed-form and quadrature-based laws of the directional cell radii of the
// Poisson Voronoi tessellation, and of the signal / shadowing quantities of
// the joint spatial-propagation model. These serve as oracles for the Monte
// Carlo estimates.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "pvt/errors.hpp"
#include "pvt/quadrature.hpp"
#include "pvt/special_functions.hpp"

namespace pvt::analytic {

inline constexpr double kPi = std::numbers::pi;

namespace detail {

inline void check_angle(double phi) {
  if (!(phi >= 0.0 && phi <= kPi)) throw ParameterError("angle must lie in [0, pi]");
}

inline double tail_cutoff(double intensity) { return quad::gaussian_tail_cutoff(intensity * kPi); }

// Tolerances for nested quadrature: inner integrals tighter than outer ones.
inline constexpr quad::Tolerance kInner{1e-10, 1e-9, 20};
inline constexpr quad::Tolerance kOuter{1e-10, 1e-8, 18};

/// Angle at the centre of the second disk, arccos((y - x cos phi) / d), with
/// d the distance between the two disk centres. The atan2 form stays exact
/// when d is tiny (x close to y and phi close to 0), where the arccos
/// argument loses all precision.
inline double lens_angle(double phi, double x, double y) {
  return std::atan2(x * std::sin(phi), y - x * std::cos(phi));
}

/// d^2 = x^2 + y^2 - 2 x y cos(phi) without cancellation.
inline double centre_distance2(double phi, double x, double y) {
  const double a = y - x * std::cos(phi);
  const double b = x * std::sin(phi);
  return a * a + b * b;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Zero-cell directional radius

/// Area of b((x,0), x) intersected with b((y,phi), y): the two open disks
/// pass through the origin and are tangent to nothing else.
inline double lens_area(double phi, double x, double y) {
  detail::check_angle(phi);
  if (x < 0.0 || y < 0.0) throw ParameterError("lens_area: radii must be non-negative");
  if (x == 0.0 || y == 0.0) return 0.0;
  if (detail::centre_distance2(phi, x, y) == 0.0) return kPi * x * x;  // identical disks
  const double a = detail::lens_angle(phi, x, y);
  return (kPi - phi) * x * x - x * y * std::sin(phi) + (y * y - x * x) * a;
}

/// Analytic derivative of lens_area with respect to y:
///   dS/dy = -x sin(phi) + 2 y A - (y^2 - x^2) x sin(phi) / d^2,
/// with A the arccos term and d^2 = x^2 + y^2 - 2 x y cos(phi).
inline double lens_area_dy(double phi, double x, double y) {
  detail::check_angle(phi);
  if (x < 0.0 || y < 0.0) throw ParameterError("lens_area_dy: radii must be non-negative");
  if (x == 0.0 || y == 0.0) return 0.0;
  const double d2 = detail::centre_distance2(phi, x, y);
  if (d2 == 0.0) return 0.0;
  const double s = std::sin(phi);
  const double a = detail::lens_angle(phi, x, y);
  return -x * s + 2.0 * y * a - (y * y - x * x) * x * s / d2;
}

/// Density of D0 = |x0|, the distance to the nearest point.
inline double d0_pdf(double x, double intensity) {
  if (x < 0.0) return 0.0;
  return 2.0 * intensity * kPi * x * std::exp(-intensity * kPi * x * x);
}

/// P(R0(phi) > y | D0 = x) = exp(-lambda (pi y^2 - S(phi, x, y))).
inline double conditional_ccdf(double phi, double x, double y, double intensity) {
  return std::exp(-intensity * (kPi * y * y - lens_area(phi, x, y)));
}

/// Density of R0(phi) given D0 = x.
inline double conditional_pdf(double phi, double x, double y, double intensity) {
  const double s = lens_area(phi, x, y);
  const double ds = lens_area_dy(phi, x, y);
  const double v = std::exp(-intensity * kPi * y * y + intensity * s) *
                   (2.0 * intensity * kPi * y - intensity * ds);
  return std::max(0.0, v);
}

/// Joint density of (D0, R0(phi)) at (x, y). For phi = 0 the support is
/// y >= x and smaller y is a domain error.
inline double zero_cell_joint_pdf(double phi, double x, double y, double intensity) {
  detail::check_angle(phi);
  if (!(intensity > 0.0)) throw ParameterError("zero_cell_joint_pdf: intensity must be positive");
  if (x < 0.0 || y < 0.0) throw ParameterError("zero_cell_joint_pdf: x, y must be non-negative");
  if (phi == 0.0 && y < x) throw ParameterError("zero_cell_joint_pdf: need y >= x at phi = 0");
  return d0_pdf(x, intensity) * conditional_pdf(phi, x, y, intensity);
}

/// Marginal density of R0(phi), integrating the joint density over x.
inline double zero_directional_pdf(double phi, double y, double intensity) {
  detail::check_angle(phi);
  if (y <= 0.0) return 0.0;
  const double upper = phi == 0.0 ? y : detail::tail_cutoff(intensity);
  auto f = [&](double x) { return d0_pdf(x, intensity) * conditional_pdf(phi, x, y, intensity); };
  const std::array<double, 1> breaks{y};
  return quad::integrate_piecewise(f, 0.0, upper, breaks, detail::kInner, "zero_directional_pdf");
}

/// P(R0(phi) > y).
inline double zero_directional_ccdf(double phi, double y, double intensity) {
  detail::check_angle(phi);
  if (y <= 0.0) return 1.0;
  auto f = [&](double x) { return d0_pdf(x, intensity) * conditional_ccdf(phi, x, y, intensity); };
  const std::array<double, 1> breaks{y};
  return quad::integrate_piecewise(f, 0.0, detail::tail_cutoff(intensity), breaks, detail::kInner,
                                   "zero_directional_ccdf");
}

/// E[R0(phi)^k] = int f_D0(x) int k y^{k-1} P(R0(phi) > y | x) dy dx.
inline double zero_directional_moment(double phi, int k, double intensity) {
  detail::check_angle(phi);
  if (k < 1) throw ParameterError("zero_directional_moment: k must be >= 1");
  const double cut = detail::tail_cutoff(intensity);
  auto inner = [&](double x) {
    auto g = [&](double y) { return k * std::pow(y, k - 1) * conditional_ccdf(phi, x, y, intensity); };
    const std::array<double, 1> breaks{x};
    return quad::integrate_piecewise(g, 0.0, x + cut, breaks, detail::kInner, "zero_directional_moment");
  };
  auto outer = [&](double x) { return d0_pdf(x, intensity) * inner(x); };
  return quad::integrate(outer, 0.0, cut, detail::kOuter, "zero_directional_moment");
}

// ---------------------------------------------------------------------------
// Closed forms at phi = 0 and phi = pi

enum class AxisLaw { r0_0, r0_pi, gap };

/// Densities of R0(0), R0(pi) and R0(0) - D0.
inline double axis_law_pdf(AxisLaw which, double y, double intensity) {
  if (y < 0.0) throw ParameterError("axis_law_pdf: y must be non-negative");
  const double lp = intensity * kPi;
  switch (which) {
    case AxisLaw::r0_0:
      return 2.0 * lp * lp * y * y * y * std::exp(-lp * y * y);
    case AxisLaw::r0_pi:
      return 2.0 * lp * y * std::exp(-lp * y * y);
    case AxisLaw::gap:
      return std::sqrt(intensity) * kPi * std::erfc(y * std::sqrt(lp));
  }
  return 0.0;
}

inline double axis_law_cdf(AxisLaw which, double y, double intensity) {
  if (y <= 0.0) return 0.0;
  const double lp = intensity * kPi;
  const double s = lp * y * y;
  switch (which) {
    case AxisLaw::r0_0:
      return -std::expm1(-s) - s * std::exp(-s);
    case AxisLaw::r0_pi:
      return -std::expm1(-s);
    case AxisLaw::gap:
      // int_0^y sqrt(lambda) pi erfc(u sqrt(lambda pi)) du
      return std::sqrt(intensity) * kPi * y * std::erfc(y * std::sqrt(lp)) - std::expm1(-s);
  }
  return 0.0;
}

/// Pearson correlation of D0 and the gap R0(0) - D0.
inline double d0_gap_correlation() {
  return (8.0 - 3.0 * kPi) / (std::sqrt(12.0 - 3.0 * kPi) * std::sqrt(16.0 - 3.0 * kPi));
}

// ---------------------------------------------------------------------------
// Uniform-angled radius of the zero-cell

inline double zero_uniform_angle_pdf(double y, double intensity) {
  if (y <= 0.0) return 0.0;
  auto f = [&](double phi) { return zero_directional_pdf(phi, y, intensity); };
  return quad::integrate(f, 0.0, kPi, detail::kOuter, "zero_uniform_angle_pdf") / kPi;
}

inline double zero_uniform_angle_cdf(double y, double intensity) {
  if (y <= 0.0) return 0.0;
  auto f = [&](double phi) { return zero_directional_ccdf(phi, y, intensity); };
  return 1.0 - quad::integrate(f, 0.0, kPi, detail::kOuter, "zero_uniform_angle_cdf") / kPi;
}

/// E[R0bar^k] = (1/pi) int_0^pi E[R0(phi)^k] dphi.
inline double zero_uniform_angle_moment(int k, double intensity) {
  auto f = [&](double phi) { return zero_directional_moment(phi, k, intensity); };
  return quad::integrate(f, 0.0, kPi, detail::kOuter, "zero_uniform_angle_moment") / kPi;
}

/// Second-moment approximation E[R0(phi)^2] ~ c(phi) / (lambda pi) with
/// c(phi) = 1 + exp(-phi^{3/2}).
inline double second_moment_approximation(double phi, double intensity) {
  return (1.0 + std::exp(-std::pow(phi, 1.5))) / (intensity * kPi);
}

struct MeanArea {
  double exact = 0.0;          ///< int_0^pi E[R0(phi)^2] dphi by quadrature
  double approximation = 0.0;  ///< 1 + 2 Gamma_inc(2/3, pi^{3/2}) / (3 pi), over lambda
};

inline MeanArea mean_area_quadrature(double intensity) {
  if (!(intensity > 0.0)) throw ParameterError("mean_area_quadrature: intensity must be positive");
  auto f = [&](double phi) { return zero_directional_moment(phi, 2, intensity); };
  MeanArea m;
  m.exact = quad::integrate(f, 0.0, kPi, detail::kOuter, "mean_area_quadrature");
  m.approximation =
      (1.0 + 2.0 * special::lower_incomplete_gamma(2.0 / 3.0, std::pow(kPi, 1.5)) / (3.0 * kPi)) /
      intensity;
  return m;
}

// ---------------------------------------------------------------------------
// Gamma-type laws

enum class GammaTypeLaw { edge, vertex, rmin };

inline double gamma_type_pdf(GammaTypeLaw which, double r, double intensity) {
  if (r < 0.0) throw ParameterError("gamma_type_pdf: r must be non-negative");
  const double lp = intensity * kPi;
  switch (which) {
    case GammaTypeLaw::edge:
      return 4.0 * std::pow(intensity, 1.5) * kPi * r * r * std::exp(-lp * r * r);
    case GammaTypeLaw::vertex:
      return 2.0 * lp * lp * r * r * r * std::exp(-lp * r * r);
    case GammaTypeLaw::rmin:
      return 8.0 * lp * r * std::exp(-4.0 * lp * r * r);
  }
  return 0.0;
}

inline double gamma_type_cdf(GammaTypeLaw which, double r, double intensity) {
  if (r <= 0.0) return 0.0;
  const double s = intensity * kPi * r * r;
  switch (which) {
    case GammaTypeLaw::edge:
      // regularized lower gamma P(3/2, s)
      return std::erf(std::sqrt(s)) - 2.0 * std::sqrt(s / kPi) * std::exp(-s);
    case GammaTypeLaw::vertex:
      return -std::expm1(-s) - s * std::exp(-s);
    case GammaTypeLaw::rmin:
      return -std::expm1(-4.0 * s);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// One-dimensional PPP

/// P(R(pi) <= r) for the typical cell of a 1D PPP:
///   1 - e^{-2 lambda r} + 2 lambda r e^{-2 lambda r} - 4 lambda^2 r^2 E1(2 lambda r).
inline double oned_r_pi_cdf(double r, double intensity) {
  if (!(intensity > 0.0)) throw ParameterError("oned_r_pi_cdf: intensity must be positive");
  if (r <= 0.0) return 0.0;
  const double u = 2.0 * intensity * r;
  return -std::expm1(-u) + u * std::exp(-u) - u * u * special::expint_e1(u);
}

inline double oned_r_pi_pdf(double r, double intensity) {
  if (r < 0.0) return 0.0;
  if (r == 0.0) return 4.0 * intensity;
  const double u = 2.0 * intensity * r;
  return 4.0 * intensity * (std::exp(-u) - u * special::expint_e1(u));
}

// ---------------------------------------------------------------------------
// Radii ratios

/// i = 0: P(|x0| / R0(0) <= t) = t^2.
/// i >= 1: P(r(x_i) / |x_i| <= t) = 1 - (1 - t^2)^i.
inline double ratio_law_cdf(int i, double t) {
  if (i < 0) throw ParameterError("ratio_law_cdf: index must be non-negative");
  if (!(t >= 0.0 && t <= 1.0)) throw ParameterError("ratio_law_cdf: t must lie in [0, 1]");
  if (i == 0) return t * t;
  return 1.0 - std::pow(1.0 - t * t, i);
}

inline double ratio_law_ccdf(int i, double t) { return 1.0 - ratio_law_cdf(i, t); }

// ---------------------------------------------------------------------------
// Generic dispatch over the radius laws

enum class Family {
  typical_uniform_angle,  ///< Rbar of the typical cell
  zero_directional,       ///< R0(phi), parameter phi
  zero_d0_joint,          ///< D0 marginal of the joint law (Rayleigh)
  zero_r0_0,
  zero_r0_pi,
  zero_gap,               ///< R0(0) - D0
  zero_uniform_angle,     ///< Rbar0
  edge_distance,
  vertex_distance,
  rmin,
  oned_r_pi,
  ratio_law,              ///< |x0| / R0(0)
  ordered_ratio_law,      ///< r(x_i) / |x_i|, parameter index i >= 1
};

struct DistributionSpec {
  Family family = Family::typical_uniform_angle;
  double intensity = 1.0;
  double phi = 0.0;
  int index = 1;
};

/// Upper end of the support used for integration.
inline double support_upper(const DistributionSpec& d) {
  switch (d.family) {
    case Family::ratio_law:
    case Family::ordered_ratio_law:
      return 1.0;
    case Family::oned_r_pi:
      return 40.0 / d.intensity;
    default:
      return detail::tail_cutoff(d.intensity) * 1.5;
  }
}

inline double pdf(const DistributionSpec& d, double y) {
  const double l = d.intensity;
  if (y < 0.0) return 0.0;
  switch (d.family) {
    case Family::typical_uniform_angle:
    case Family::zero_d0_joint:
    case Family::zero_r0_pi:
      return axis_law_pdf(AxisLaw::r0_pi, y, l);
    case Family::zero_directional:
      return zero_directional_pdf(d.phi, y, l);
    case Family::zero_r0_0:
      return axis_law_pdf(AxisLaw::r0_0, y, l);
    case Family::zero_gap:
      return axis_law_pdf(AxisLaw::gap, y, l);
    case Family::zero_uniform_angle:
      return zero_uniform_angle_pdf(y, l);
    case Family::edge_distance:
      return gamma_type_pdf(GammaTypeLaw::edge, y, l);
    case Family::vertex_distance:
      return gamma_type_pdf(GammaTypeLaw::vertex, y, l);
    case Family::rmin:
      return gamma_type_pdf(GammaTypeLaw::rmin, y, l);
    case Family::oned_r_pi:
      return oned_r_pi_pdf(y, l);
    case Family::ratio_law:
      return y <= 1.0 ? 2.0 * y : 0.0;
    case Family::ordered_ratio_law:
      return y <= 1.0 ? 2.0 * d.index * y * std::pow(1.0 - y * y, d.index - 1) : 0.0;
  }
  return 0.0;
}

inline double cdf(const DistributionSpec& d, double y) {
  const double l = d.intensity;
  if (y <= 0.0) return 0.0;
  switch (d.family) {
    case Family::typical_uniform_angle:
    case Family::zero_d0_joint:
    case Family::zero_r0_pi:
      return axis_law_cdf(AxisLaw::r0_pi, y, l);
    case Family::zero_directional:
      return 1.0 - zero_directional_ccdf(d.phi, y, l);
    case Family::zero_r0_0:
      return axis_law_cdf(AxisLaw::r0_0, y, l);
    case Family::zero_gap:
      return axis_law_cdf(AxisLaw::gap, y, l);
    case Family::zero_uniform_angle:
      return zero_uniform_angle_cdf(y, l);
    case Family::edge_distance:
      return gamma_type_cdf(GammaTypeLaw::edge, y, l);
    case Family::vertex_distance:
      return gamma_type_cdf(GammaTypeLaw::vertex, y, l);
    case Family::rmin:
      return gamma_type_cdf(GammaTypeLaw::rmin, y, l);
    case Family::oned_r_pi:
      return oned_r_pi_cdf(y, l);
    case Family::ratio_law:
      return ratio_law_cdf(0, std::min(y, 1.0));
    case Family::ordered_ratio_law:
      return ratio_law_cdf(d.index, std::min(y, 1.0));
  }
  return 0.0;
}

inline double ccdf(const DistributionSpec& d, double y) { return 1.0 - cdf(d, y); }

/// Piecewise-linear interpolant of a cdf tabulated on a uniform grid; used
/// when the cdf itself costs a nested quadrature per evaluation.
class TabulatedCdf {
 public:
  template <typename F>
  TabulatedCdf(F&& cdf_fn, double upper, std::size_t points) : upper_(upper) {
    if (points < 2 || !(upper > 0.0)) throw ParameterError("TabulatedCdf: bad grid");
    values_.reserve(points);
    for (std::size_t i = 0; i < points; ++i)
      values_.push_back(cdf_fn(upper * static_cast<double>(i) / static_cast<double>(points - 1)));
  }

  double operator()(double y) const {
    if (y <= 0.0) return values_.front();
    if (y >= upper_) return values_.back();
    const double h = upper_ / static_cast<double>(values_.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(y / h), values_.size() - 2);
    const double w = y / h - static_cast<double>(i);
    return (1.0 - w) * values_[i] + w * values_[i + 1];
  }

 private:
  double upper_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// SIR and shadowing laws

/// Moments of the conditional success probability of the standard PPP with
/// Rayleigh fading: M_b(theta) = 1 / 2F1(b, -delta; 1 - delta; -theta).
inline double standard_ppp_moment(double b, double theta, double alpha) {
  if (!(alpha > 2.0)) throw ParameterError("standard_ppp_moment: need alpha > 2");
  if (b < 0.0 || theta < 0.0) throw ParameterError("standard_ppp_moment: need b >= 0, theta >= 0");
  return 1.0 / special::hyp2f1_moment_family(b, 2.0 / alpha, theta);
}

/// MISR of the standard PPP, 2 / (alpha - 2).
inline double misr_ppp(double alpha) {
  if (!(alpha > 2.0)) throw ParameterError("misr_ppp: need alpha > 2");
  return 2.0 / (alpha - 2.0);
}

enum class ShadowingRole { serving, interferer };

/// ccdf of the shadowing coefficient for sigma = 0:
///   serving K_{x0}:   exp(-lambda pi t^d P0^-d) (1 + lambda pi t^d P0^-d)
///   interferer K_xi:  exp(-lambda pi t^d P0^-d)
inline double shadowing_ccdf(ShadowingRole role, double t, double intensity, double p0, double alpha) {
  if (!(alpha > 2.0) || !(p0 > 0.0) || !(intensity > 0.0))
    throw ParameterError("shadowing_ccdf: bad parameters");
  if (t <= 0.0) return 1.0;
  const double delta = 2.0 / alpha;
  const double s = intensity * kPi * std::pow(t / p0, delta);
  return role == ShadowingRole::serving ? std::exp(-s) * (1.0 + s) : std::exp(-s);
}

struct ShadowingMoments {
  double mean_serving = 0.0;
  double mean_interferer = 0.0;
  double var_serving = 0.0;
  double var_interferer = 0.0;
};

inline ShadowingMoments shadowing_moments(double intensity, double p0, double alpha) {
  if (!(alpha > 2.0) || !(p0 > 0.0) || !(intensity > 0.0))
    throw ParameterError("shadowing_moments: bad parameters");
  const double scale = p0 * std::pow(intensity * kPi, -0.5 * alpha);
  ShadowingMoments m;
  m.mean_serving = scale * std::tgamma(0.5 * alpha + 2.0);
  m.mean_interferer = scale * std::tgamma(0.5 * alpha + 1.0);
  m.var_serving = scale * scale * (std::tgamma(alpha + 2.0) - std::pow(std::tgamma(0.5 * alpha + 2.0), 2));
  m.var_interferer = scale * scale * (std::tgamma(alpha + 1.0) - std::pow(std::tgamma(0.5 * alpha + 1.0), 2));
  return m;
}

/// ccdf of the mean serving power for sigma = 0: (P0 / t)^delta for t >= P0,
/// and 1 below the minimum received power P0.
inline double serving_signal_ccdf(double t, double p0, double alpha) {
  if (!(alpha > 2.0) || !(p0 > 0.0)) throw ParameterError("serving_signal_ccdf: bad parameters");
  if (t <= p0) return 1.0;
  return std::pow(p0 / t, 2.0 / alpha);
}

}  // namespace pvt::analytic
