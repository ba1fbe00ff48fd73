#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pvt/errors.hpp"
#include "pvt/stats.hpp"

namespace pvt::quad {

/// Acceptance rule: |error| <= max(abs_tol, rel_tol * |integral|).
struct Tolerance {
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  unsigned max_depth = 18;
};

/// Globally adaptive 31-point Gauss-Kronrod integration of `f` over [a, b]:
/// the panel with the largest error is bisected until the summed error meets
/// the tolerance. Panels are never narrower than (b - a) / 2^max_depth.
/// Throws NumericError, naming `context`, when the tolerance is missed.
///
/// Boost supplies the single-panel rule only; its own adaptive driver reports
/// errors in the unscaled [-1, 1] units, so the bisection lives here.
template <typename F>
double integrate(F&& f, double a, double b, Tolerance tol = {},
                 const char* context = "integrate") {
  if (a == b) return 0.0;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  struct Panel {
    double lo, hi, value, error;
    unsigned depth;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto eval = [&](double lo, double hi, unsigned depth) {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double err = 0.0;
    const double v = Rule::integrate([&](double x) { return f(half * x + mid); }, -1.0, 1.0, 0, 0.0, &err);
    return Panel{lo, hi, half * v, std::abs(half) * err, depth};
  };
  std::priority_queue<Panel> open;
  std::vector<Panel> done;
  open.push(eval(a, b, 0));
  double value = open.top().value, error = open.top().error;
  constexpr std::size_t kMaxPanels = 1 << 14;
  while (!open.empty() && std::isfinite(value) &&
         error > std::max(tol.abs_tol, tol.rel_tol * std::abs(value)) && open.size() + done.size() < kMaxPanels) {
    const Panel p = open.top();
    open.pop();
    if (p.depth >= tol.max_depth) {
      done.push_back(p);
      continue;
    }
    const double mid = 0.5 * (p.lo + p.hi);
    const Panel l = eval(p.lo, mid, p.depth + 1), r = eval(mid, p.hi, p.depth + 1);
    value += l.value + r.value - p.value;
    error += l.error + r.error - p.error;
    open.push(l);
    open.push(r);
  }
  // resum to shed the drift of the running updates
  stats::CompensatedSum total, total_err;
  for (; !open.empty(); open.pop()) {
    total.add(open.top().value);
    total_err.add(open.top().error);
  }
  for (const auto& p : done) {
    total.add(p.value);
    total_err.add(p.error);
  }
  value = total.value();
  error = total_err.value();
  if (!std::isfinite(value) || error > std::max(tol.abs_tol, tol.rel_tol * std::abs(value))) {
    std::ostringstream os;
    os << context << ": quadrature on [" << a << ", " << b << "] reached error " << error
       << " for value " << value;
    throw NumericError(os.str());
  }
  return value;
}

/// Integral over [a, b] split at the interior break points in `breaks`
/// (ignored if outside the interval).
template <typename F, typename Range>
double integrate_piecewise(F&& f, double a, double b, const Range& breaks,
                           Tolerance tol = {}, const char* context = "integrate") {
  double lo = a;
  double total = 0.0;
  for (double c : breaks) {
    if (c <= lo || c >= b) continue;
    total += integrate(f, lo, c, tol, context);
    lo = c;
  }
  return total + integrate(f, lo, b, tol, context);
}

/// Upper integration limit for a Gaussian-tailed integrand exp(-s r^2):
/// beyond it the integrand falls below 1e-16 relative to its scale.
inline double gaussian_tail_cutoff(double s) { return std::sqrt(37.0 / s); }

}  // namespace pvt::quad
