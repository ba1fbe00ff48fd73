#pragma once

// Special functions needed by the closed-form radius and SIR laws: the
// exponential integral E1, the lower incomplete gamma function, and the
// Gauss hypergeometric function restricted to 2F1(b, -delta; 1 - delta; -theta).

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "pvt/errors.hpp"
#include "pvt/quadrature.hpp"

namespace pvt::special {

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.
/// Power series below 1, modified-Lentz continued fraction above.
inline double expint_e1(double x) {
  if (!(x > 0.0)) throw ParameterError("expint_e1: argument must be positive");
  constexpr double eps = 1e-16;
  constexpr int max_iter = 500;
  if (x < 1.0) {
    // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k <= max_iter; ++k) {
      term *= -x / k;
      const double add = term / k;
      sum += add;
      if (std::abs(add) < eps * std::abs(sum)) break;
    }
    return -std::numbers::egamma - std::log(x) - sum;
  }
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= max_iter; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h * std::exp(-x);
  }
  throw NumericError("expint_e1: continued fraction did not converge");
}

/// Lower incomplete gamma function int_0^z e^{-t} t^{a-1} dt.
inline double lower_incomplete_gamma(double a, double z) {
  if (!(a > 0.0) || z < 0.0) throw ParameterError("lower_incomplete_gamma: need a > 0, z >= 0");
  return boost::math::tgamma_lower(a, z);
}

/// 2F1(b, -delta; 1 - delta; -theta) for b >= 0, delta in (0, 1), theta >= 0.
///
/// From the series, (-delta)_n / (1 - delta)_n = -delta / (n - delta), hence
///   2F1(-delta, c; 1 - delta; z) = 1 - delta int_0^1 t^{-delta-1} [(1 - z t)^{-c} - 1] dt.
/// The substitution t = v^{1/(1-delta)} removes the endpoint singularity:
///   = 1 - delta/(1-delta) int_0^1 v^{-1/(1-delta)} [(1 - z v^{1/(1-delta)})^{-c} - 1] dv,
/// whose bracketed integrand tends to c z at v = 0. For theta <= 1
/// this is applied with z = -theta, c = b. For theta > 1 the Pfaff transform
///   2F1(b, -delta; 1-delta; -theta) = (1+theta)^delta 2F1(-delta, 1-delta-b; 1-delta; theta/(1+theta))
/// keeps |z| < 1 and the integrand bounded.
inline double hyp2f1_moment_family(double b, double delta, double theta) {
  if (b < 0.0 || !(delta > 0.0 && delta < 1.0) || theta < 0.0 || !std::isfinite(theta))
    throw ParameterError("hyp2f1_moment_family: need b >= 0, 0 < delta < 1, theta >= 0");
  if (theta == 0.0 || b == 0.0) return 1.0;
  const double p = 1.0 / (1.0 - delta);
  auto series_integral = [&](double z, double c) {
    auto integrand = [&](double v) {
      if (v <= 0.0) return c * z;
      const double t = std::pow(v, p);
      // (1 - z t)^{-c} - 1 without cancellation
      return std::expm1(-c * std::log1p(-z * t)) * std::pow(v, -p);
    };
    const double integral =
        quad::integrate(integrand, 0.0, 1.0, {1e-13, 1e-11, 20}, "hyp2f1_moment_family");
    return 1.0 - delta * p * integral;
  };
  if (theta <= 1.0) return series_integral(-theta, b);
  const double w = theta / (1.0 + theta);
  return std::pow(1.0 + theta, delta) * series_integral(w, 1.0 - delta - b);
}

}  // namespace pvt::special
