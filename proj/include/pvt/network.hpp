#pragma once

// Joint spatial-propagation (JSP) cellular model: cell-dependent shadowing,
// strongest-BS association, Rayleigh-fading success probabilities, MISR and
// asymptotic gain, SIR meta distribution and the path-loss point process.
// Baselines: no shadowing and iid log-normal shadowing, on PPP or
// triangular-lattice deployments.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pvt/analytic.hpp"
#include "pvt/errors.hpp"
#include "pvt/geometry.hpp"
#include "pvt/parallel.hpp"
#include "pvt/quadrature.hpp"
#include "pvt/rng.hpp"
#include "pvt/stats.hpp"

namespace pvt::network {

enum class Deployment { ppp, triangular };
enum class ShadowingMode { jsp, iid_lognormal, none };

inline const char* to_string(Deployment d) { return d == Deployment::ppp ? "ppp" : "triangular"; }

inline const char* to_string(ShadowingMode m) {
  switch (m) {
    case ShadowingMode::jsp: return "jsp";
    case ShadowingMode::iid_lognormal: return "iid_lognormal";
    case ShadowingMode::none: return "none";
  }
  return "?";
}

/// Default interferer truncation radius, in units of 1/sqrt(intensity).
inline constexpr double kDefaultTruncationFactor = 8.0;
/// Extra window beyond the truncation radius so that cell radii of all
/// retained BSs are certified, in units of 1/sqrt(intensity).
inline constexpr double kDefaultWindowMargin = 6.0;

struct JspConfig {
  double intensity = 1.0;
  double path_loss_exponent = 4.0;
  double edge_power = 1.0;
  double shadowing_sigma = 0.0;
  Deployment deployment = Deployment::ppp;
  ShadowingMode shadowing_mode = ShadowingMode::jsp;
  /// BSs beyond this distance are not simulated; 0 selects the default.
  double truncation_radius = 0.0;
  /// Sampling window; 0 selects truncation radius plus a margin.
  double window_radius = 0.0;
  /// Add the mean interference from beyond the truncation radius.
  bool far_field_correction = true;
  int max_attempts = 64;

  double delta() const { return 2.0 / path_loss_exponent; }

  double resolved_truncation() const {
    return truncation_radius > 0.0 ? truncation_radius : kDefaultTruncationFactor / std::sqrt(intensity);
  }

  double resolved_window() const {
    if (window_radius > 0.0) return window_radius;
    const double margin = needs_cell_radii() ? kDefaultWindowMargin / std::sqrt(intensity) : 0.0;
    return resolved_truncation() + margin;
  }

  bool needs_cell_radii() const { return shadowing_mode == ShadowingMode::jsp; }

  /// Throws ParameterError on invalid combinations. Retaining fewer than
  /// about a dozen interferers makes the far-field term dominate, so the
  /// truncation radius must be at least 2/sqrt(intensity).
  void validate() const {
    pvt::detail::require(intensity > 0.0 && std::isfinite(intensity), "intensity must be positive");
    pvt::detail::require(path_loss_exponent > 2.0 && std::isfinite(path_loss_exponent),
                         "path_loss_exponent must exceed 2");
    pvt::detail::require(edge_power > 0.0 && std::isfinite(edge_power), "edge_power must be positive");
    pvt::detail::require(shadowing_sigma >= 0.0 && std::isfinite(shadowing_sigma),
                         "shadowing_sigma must be non-negative");
    pvt::detail::require(truncation_radius >= 0.0 && window_radius >= 0.0, "radii must be non-negative");
    pvt::detail::require(resolved_truncation() * std::sqrt(intensity) >= 2.0,
                         "truncation_radius must be at least 2/sqrt(intensity)");
    pvt::detail::require(resolved_window() >= resolved_truncation(),
                         "window_radius must be at least the truncation radius");
    pvt::detail::require(max_attempts >= 1, "max_attempts must be positive");
  }
};

/// Mean shadowing coefficient E[K] of a BS far from the user. For the JSP
/// model r(x) of a distant BS is the directional radius of a typical cell in
/// a fixed direction: Rayleigh for the PPP, and the hexagon radius at a
/// uniform angle for the lattice.
inline double far_field_mean_shadowing(const JspConfig& cfg) {
  if (cfg.shadowing_mode != ShadowingMode::jsp) return 1.0;
  const double a = cfg.path_loss_exponent;
  if (cfg.deployment == Deployment::ppp)
    return cfg.edge_power * std::tgamma(1.0 + 0.5 * a) * std::pow(cfg.intensity * std::numbers::pi, -0.5 * a);
  const double apothem = 0.5 * geometry::triangular_spacing(cfg.intensity);
  auto f = [&](double phi) { return std::pow(1.0 / std::cos(phi), a); };
  const double mean_sec =
      quad::integrate(f, 0.0, std::numbers::pi / 6.0, {1e-12, 1e-10, 18}, "far_field_mean_shadowing") *
      6.0 / std::numbers::pi;
  return cfg.edge_power * std::pow(apothem, a) * mean_sec;
}

/// Mean received power from all BSs beyond the truncation radius R:
///   int_R^inf lambda 2 pi r E[K] r^{-alpha} dr = 2 pi lambda E[K] R^{2-alpha} / (alpha - 2).
inline double far_field_interference(const JspConfig& cfg) {
  const double a = cfg.path_loss_exponent;
  const double r = cfg.resolved_truncation();
  return 2.0 * std::numbers::pi * cfg.intensity * far_field_mean_shadowing(cfg) * std::pow(r, 2.0 - a) /
         (a - 2.0);
}

struct BaseStation {
  Vec2 position;
  double distance = 0.0;
  /// r(x): radius of the BS's cell towards the user; NaN when not needed.
  double cell_radius = std::numeric_limits<double>::quiet_NaN();
  double shadowing = 1.0;
  /// Mean received power K_x |x|^-alpha.
  double power = 0.0;
};

struct NetworkRealization {
  /// BSs within the truncation radius, ordered by distance from the user.
  std::vector<BaseStation> bs;
  std::size_t serving_index = 0;
  /// Mean interference power from beyond the truncation radius (0 when the
  /// correction is disabled).
  double far_field = 0.0;
  double path_loss_exponent = 4.0;
  double edge_power = 1.0;
  double shadowing_sigma = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  int discarded = 0;

  const BaseStation& serving() const { return bs[serving_index]; }
  double serving_power() const { return bs[serving_index].power; }
};

namespace detail {

// Independent stream for the per-BS Gaussians, so the shadowing of a BS does
// not depend on how many points were drawn.
inline constexpr std::uint64_t kShadowingStream = 0x6a09e667f3bcc909ULL;

}  // namespace detail

/// One realization of the network seen from a user at the origin.
inline NetworkRealization build_realization(const JspConfig& cfg, std::uint64_t seed,
                                            std::uint64_t replicate = 0) {
  cfg.validate();
  const double trunc = cfg.resolved_truncation();
  const double window = cfg.resolved_window();
  const double a = cfg.path_loss_exponent;
  const double sigma = cfg.shadowing_sigma;
  const double far = cfg.far_field_correction ? far_field_interference(cfg) : 0.0;
  return geometry::detail::with_retries(cfg.max_attempts, [&](std::uint64_t attempt) {
    std::vector<Vec2> pts;
    if (cfg.deployment == Deployment::ppp) {
      Engine eng = make_engine(seed, replicate, attempt);
      geometry::RadialPointStream stream(eng, cfg.intensity, window);
      while (auto p = stream.next()) pts.push_back(*p);
    } else {
      const auto lattice = geometry::triangular_lattice(cfg.intensity, window, seed, replicate, attempt);
      pts.assign(lattice.points().begin(), lattice.points().end());
    }
    const geometry::PointSet set(std::move(pts), window, cfg.intensity);
    if (set.size() < 2) throw TruncationError("build_realization: fewer than two BSs");

    Engine shadow = make_engine(seed ^ detail::kShadowingStream, replicate, attempt);
    std::normal_distribution<double> gauss;
    std::optional<geometry::SpatialIndex> index;
    if (cfg.needs_cell_radii()) index.emplace(set);

    NetworkRealization real;
    real.far_field = far;
    real.path_loss_exponent = a;
    real.edge_power = cfg.edge_power;
    real.shadowing_sigma = sigma;
    real.seed = seed;
    real.replicate = replicate;
    for (std::size_t i = 0; i < set.size(); ++i) {
      const Vec2 x = set[i];
      const double d = norm(x);
      if (d > trunc) break;  // points are sorted by distance
      if (d == 0.0) throw CoincidentPointsError("build_realization: BS at the user location");
      BaseStation b;
      b.position = x;
      b.distance = d;
      const double g = gauss(shadow);
      const double lognormal = std::exp(sigma * g - 0.5 * sigma * sigma);
      switch (cfg.shadowing_mode) {
        case ShadowingMode::jsp:
          b.cell_radius = index->radius_toward(i, Vec2{});
          b.shadowing = cfg.edge_power * std::pow(b.cell_radius, a) * lognormal;
          break;
        case ShadowingMode::iid_lognormal:
          b.shadowing = lognormal;
          break;
        case ShadowingMode::none:
          b.shadowing = 1.0;
          break;
      }
      b.power = b.shadowing * std::pow(d, -a);
      real.bs.push_back(b);
    }
    if (real.bs.size() < 2) throw TruncationError("build_realization: fewer than two BSs in range");
    real.serving_index = static_cast<std::size_t>(
        std::max_element(real.bs.begin(), real.bs.end(),
                         [](const BaseStation& l, const BaseStation& r) { return l.power < r.power; }) -
        real.bs.begin());
    return real;
  });
}

/// P(SIR > theta | Phi, K) under Rayleigh fading:
///   prod_y 1 / (1 + theta P_y / P_x),
/// with the far field entering through its mean, exp(-theta far / P_x).
inline double conditional_success(const NetworkRealization& real, double theta) {
  if (real.bs.size() < 2) throw ParameterError("conditional_success: need at least two BSs");
  if (theta < 0.0) throw ParameterError("conditional_success: theta must be non-negative");
  const double ps = real.serving_power();
  double log_p = -theta * real.far_field / ps;
  for (std::size_t i = 0; i < real.bs.size(); ++i)
    if (i != real.serving_index) log_p -= std::log1p(theta * real.bs[i].power / ps);
  return std::exp(log_p);
}

/// Interference-to-mean-signal ratio of one realization.
inline double misr(const NetworkRealization& real) {
  const double ps = real.serving_power();
  stats::CompensatedSum s;
  for (std::size_t i = 0; i < real.bs.size(); ++i)
    if (i != real.serving_index) s.add(real.bs[i].power / ps);
  s.add(real.far_field / ps);
  return s.value();
}

/// Evaluates `fn` on `n` independent realizations (replicates 0..n-1).
template <typename Result, typename Fn>
std::vector<Result> simulate(const JspConfig& cfg, std::size_t n, std::uint64_t seed, Fn&& fn,
                             Parallelism par = {}) {
  cfg.validate();
  return parallel_map<Result>(
      n, [&](std::size_t i) { return fn(build_realization(cfg, seed, i)); }, par);
}

struct GainEstimate {
  stats::Estimate misr;
  double misr_median_of_means = 0.0;
  /// Mean far-field share of the MISR (the correction, or the bound on the
  /// neglected part when the correction is disabled).
  double far_field_term = 0.0;
  stats::Estimate gain;
  stats::Estimate gain_db;
  double gain_db_median_of_means = 0.0;
  std::size_t realizations = 0;
  int discarded = 0;
};

inline constexpr std::size_t kMedianOfMeansBatches = 32;

/// Asymptotic gain G = MISR_PPP / MISR relative to the standard PPP, in dB as
/// 10 log10 G, with delta-method standard errors.
inline GainEstimate estimate_gain(const JspConfig& cfg, std::size_t n, std::uint64_t seed,
                                  Parallelism par = {}) {
  if (n < kMedianOfMeansBatches) throw ParameterError("estimate_gain: need at least 32 realizations");
  struct Row {
    double misr = 0.0;
    double far = 0.0;
    int discarded = 0;
  };
  JspConfig bound_cfg = cfg;
  bound_cfg.far_field_correction = true;
  const double far_mean = far_field_interference(bound_cfg);
  const auto rows = simulate<Row>(
      cfg, n, seed,
      [&](const NetworkRealization& r) { return Row{misr(r), far_mean / r.serving_power(), r.discarded}; },
      par);
  std::vector<double> m;
  m.reserve(n);
  stats::MomentAccumulator far;
  GainEstimate g;
  for (const auto& r : rows) {
    m.push_back(r.misr);
    far.add(r.far);
    g.discarded += r.discarded;
  }
  g.realizations = n;
  g.misr = stats::mean(m);
  g.misr_median_of_means = stats::median_of_means(m, kMedianOfMeansBatches);
  g.far_field_term = far.mean();
  const double base = analytic::misr_ppp(cfg.path_loss_exponent);
  g.gain = {base / g.misr.value, base * g.misr.std_error / (g.misr.value * g.misr.value)};
  g.gain_db = {10.0 * std::log10(g.gain.value), 10.0 / std::numbers::ln10 * g.misr.std_error / g.misr.value};
  g.gain_db_median_of_means = 10.0 * std::log10(base / g.misr_median_of_means);
  return g;
}

struct MetaDistribution {
  std::vector<double> thetas;
  std::vector<double> xs;
  /// ccdf[i][j] = fraction of realizations with P_s(thetas[i]) > xs[j].
  std::vector<std::vector<double>> ccdf;
  std::vector<stats::Estimate> m1;
  std::vector<stats::Estimate> m2;
  std::size_t realizations = 0;
};

/// Empirical SIR meta distribution F(theta, x) = P(P_s(theta) > x) and the
/// first two moments of P_s(theta), over `n` realizations.
inline MetaDistribution meta_distribution(const JspConfig& cfg, std::span<const double> thetas,
                                          std::span<const double> xs, std::size_t n, std::uint64_t seed,
                                          Parallelism par = {}) {
  if (thetas.empty() || xs.empty()) throw ParameterError("meta_distribution: grids must be non-empty");
  for (double x : xs)
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("meta_distribution: x grid must lie in [0, 1]");
  if (n < 2) throw ParameterError("meta_distribution: need at least two realizations");
  const auto rows = simulate<std::vector<double>>(
      cfg, n, seed,
      [&](const NetworkRealization& r) {
        std::vector<double> p;
        p.reserve(thetas.size());
        for (double t : thetas) p.push_back(conditional_success(r, t));
        return p;
      },
      par);
  MetaDistribution md;
  md.thetas.assign(thetas.begin(), thetas.end());
  md.xs.assign(xs.begin(), xs.end());
  md.realizations = n;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    std::vector<double> col(n);
    std::vector<double> sq(n);
    for (std::size_t k = 0; k < n; ++k) {
      col[k] = rows[k][i];
      sq[k] = col[k] * col[k];
    }
    md.m1.push_back(stats::mean(col));
    md.m2.push_back(stats::mean(sq));
    const stats::EmpiricalDistribution dist(std::move(col));
    std::vector<double> line;
    for (double x : xs) line.push_back(dist.ccdf(x));
    md.ccdf.push_back(std::move(line));
  }
  return md;
}

/// Constant c = P0 exp(-sigma^2 (1 - delta) / 2) = (E[(K/r^alpha)^delta])^{1/delta}.
/// Dividing the shadowing by c gives E #{x : (|x|^alpha c / K)^{1/alpha} < t} = t^2
/// for every sigma.
inline double path_loss_rescaling(double edge_power, double sigma, double alpha) {
  return edge_power * std::exp(-0.5 * sigma * sigma * (1.0 - 2.0 / alpha));
}

/// Path-loss values |x|^alpha / K_x of the BSs in a realization, sorted. With
/// `rescale`, the shadowing is divided by the rescaling constant, i.e. the
/// values are multiplied by it.
inline std::vector<double> path_loss_process(const NetworkRealization& real, bool rescale) {
  const double a = real.path_loss_exponent;
  const double c = rescale ? path_loss_rescaling(real.edge_power, real.shadowing_sigma, a) : 1.0;
  std::vector<double> v;
  v.reserve(real.bs.size());
  for (const auto& b : real.bs) {
    if (!(b.distance > 0.0)) throw ParameterError("path_loss_process: BS at the origin");
    v.push_back(c * std::pow(b.distance, a) / b.shadowing);
  }
  std::sort(v.begin(), v.end());
  return v;
}

/// Expected number of BSs beyond `truncation` whose rescaled path loss is
/// below t^alpha, for the JSP model on a PPP. By the Campbell-Mecke formula
/// r(x) of such a BS is Rayleigh, giving
///   E_G[ t^2 Y exp(-lambda pi R^2 / (t^2 Y)) ],  Y = exp(delta sigma G - delta^2 sigma^2 / 2).
inline double path_loss_far_count(double t, double truncation, double intensity, double sigma, double alpha) {
  const double delta = 2.0 / alpha;
  const double lp = intensity * std::numbers::pi * truncation * truncation;
  auto term = [&](double y) { return t * t * y * std::exp(-lp / (t * t * y)); };
  if (sigma == 0.0) return term(1.0);
  const double s = delta * sigma;
  auto f = [&](double z) {
    return term(std::exp(s * z - 0.5 * s * s)) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  };
  const std::array<double, 3> breaks{-3.0, 0.0, 3.0};
  return quad::integrate_piecewise(f, -12.0, 12.0, breaks, {1e-13, 1e-10, 20}, "path_loss_far_count");
}

struct IntensityMeasurePoint {
  double t = 0.0;
  /// Mean count of simulated BSs (within the truncation radius).
  stats::Estimate simulated;
  /// Expected count beyond the truncation radius.
  double far_field = 0.0;
  /// simulated + far_field, the estimate of Lambda([0, t)).
  double total = 0.0;
};

/// Empirical intensity measure of the rescaled path-loss process on the
/// distance scale, Lambda([0, t)) = E #{x : (c |x|^alpha / K_x)^{1/alpha} < t},
/// for the JSP model on a PPP.
inline std::vector<IntensityMeasurePoint> path_loss_intensity(const JspConfig& cfg, std::span<const double> ts,
                                                              std::size_t n, std::uint64_t seed,
                                                              Parallelism par = {}) {
  if (cfg.shadowing_mode != ShadowingMode::jsp || cfg.deployment != Deployment::ppp)
    throw ParameterError("path_loss_intensity: requires the JSP model on a PPP");
  if (ts.empty() || n < 2) throw ParameterError("path_loss_intensity: bad grid or replicate count");
  const double a = cfg.path_loss_exponent;
  const auto rows = simulate<std::vector<double>>(
      cfg, n, seed,
      [&](const NetworkRealization& r) {
        const auto v = path_loss_process(r, true);
        std::vector<double> counts;
        for (double t : ts)
          counts.push_back(static_cast<double>(std::lower_bound(v.begin(), v.end(), std::pow(t, a)) - v.begin()));
        return counts;
      },
      par);
  std::vector<IntensityMeasurePoint> out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = rows[k][i];
    IntensityMeasurePoint p;
    p.t = ts[i];
    p.simulated = stats::mean(col);
    p.far_field = cfg.far_field_correction
                      ? path_loss_far_count(ts[i], cfg.resolved_truncation(), cfg.intensity, cfg.shadowing_sigma, a)
                      : 0.0;
    p.total = p.simulated.value + p.far_field;
    out.push_back(p);
  }
  return out;
}

}  // namespace pvt::network
