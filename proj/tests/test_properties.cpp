// Invariants checked on moderate sample sizes; the full-size versions run in
// the acceptance binary.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "pvt/analytic.hpp"
#include "pvt/geometry.hpp"
#include "pvt/network.hpp"
#include "pvt/rng.hpp"
#include "pvt/stats.hpp"

using namespace pvt;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(GeometryProperties, ExactnessGuardHoldsOnAcceptedSamples) {
  geometry::CellOptions opt;
  opt.grid = std::make_shared<const geometry::AngleGrid>(90);
  const double half_window = 0.5 * opt.window_factor;
  int discarded = 0;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    const auto z = geometry::sample_zero_cell(1.0, 31, r, opt);
    const auto t = geometry::sample_typical_cell(1.0, 32, r, opt);
    discarded += z.discarded + t.discarded;
    for (double v : z.radii) ASSERT_LT(v + z.anchor_distance, half_window);
    for (double v : t.radii) ASSERT_LT(v, half_window);
  }
  EXPECT_EQ(discarded, 0);
}

TEST(GeometryProperties, ScaleEquivariance) {
  geometry::CellOptions opt;
  opt.grid = std::make_shared<const geometry::AngleGrid>(32);
  const double c = 1.7;
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto a = geometry::sample_typical_cell(2.0, 4, r, opt);
    const auto b = geometry::sample_typical_cell(2.0 / (c * c), 4, r, opt);
    for (std::size_t k = 0; k < a.radii.size(); ++k) ASSERT_NEAR(b.radii[k], c * a.radii[k], 1e-11);
    ASSERT_NEAR(b.anchor_distance, c * a.anchor_distance, 1e-11);
    ASSERT_NEAR(b.area, c * c * a.area, 1e-10);
  }
}

TEST(GeometryProperties, RatioLawAndSymmetry) {
  geometry::CellOptions opt;
  opt.grid = std::make_shared<const geometry::AngleGrid>(36);
  const std::size_t n = 20000;
  std::vector<double> zr, tr, asym, d0, rpi;
  const std::size_t i1 = opt.grid->index_of(1.0), i2 = opt.grid->index_of(2 * kPi - 1.0);
  for (std::uint64_t r = 0; r < n; ++r) {
    const auto z = geometry::sample_zero_cell(1.0, 51, r, opt);
    const auto t = geometry::sample_typical_cell(1.0, 52, r, opt);
    zr.push_back(z.anchor_distance / z.radius_at(0.0));
    tr.push_back(t.anchor_distance / t.radius_at(0.0));
    asym.push_back(t.radii[i1] - t.radii[i2]);
    d0.push_back(z.anchor_distance);
    rpi.push_back(z.radius_at(kPi));
  }
  const double crit = stats::kolmogorov_critical_value(n, 0.001);
  auto t2 = [](double t) { return std::clamp(t * t, 0.0, 1.0); };
  EXPECT_LT(stats::ks_distance(stats::EmpiricalDistribution(zr), t2), crit);
  EXPECT_LT(stats::ks_distance(stats::EmpiricalDistribution(tr), t2), crit);
  // E R(phi) = E R(-phi)
  const auto diff = stats::mean(asym);
  EXPECT_LT(std::abs(diff.value), 4.0 * diff.std_error);
  // D0 and R0(pi) are iid Rayleigh
  const auto rho = stats::correlation(d0, rpi);
  EXPECT_LT(std::abs(rho.value), 4.0 * rho.std_error);
  auto rayleigh = [](double y) { return -std::expm1(-kPi * y * y); };
  EXPECT_LT(stats::ks_distance(stats::EmpiricalDistribution(d0), rayleigh), crit);
  EXPECT_LT(stats::ks_distance(stats::EmpiricalDistribution(rpi), rayleigh), crit);
}

TEST(GeometryProperties, AreaIsHalfIntegralOfSquaredRadius) {
  geometry::CellOptions opt;
  opt.grid = std::make_shared<const geometry::AngleGrid>(720);
  for (std::uint64_t r = 0; r < 200; ++r) {
    for (const auto& s : {geometry::sample_typical_cell(1.0, 61, r, opt), geometry::sample_zero_cell(1.0, 62, r, opt)}) {
      const auto ang = s.grid->angles();
      double integral = 0.0;
      for (std::size_t k = 0; k < ang.size(); ++k) {
        const std::size_t nx = (k + 1) % ang.size();
        const double h = nx == 0 ? 2 * kPi - ang[k] : ang[nx] - ang[k];
        integral += 0.5 * h * (s.radii[k] * s.radii[k] + s.radii[nx] * s.radii[nx]);
      }
      ASSERT_NEAR(0.5 * integral, s.area, 0.01 * s.area);
    }
  }
}

TEST(AnalyticProperties, GammaIdentityForR0AtZero) {
  for (double lambda : {0.5, 1.0, 3.0})
    for (double y : {0.05, 0.2, 0.5, 0.8, 1.2, 2.0})
      EXPECT_NEAR(analytic::axis_law_cdf(analytic::AxisLaw::r0_0, y, lambda),
                  boost::math::gamma_p(2.0, lambda * kPi * y * y), 1e-10);
}

TEST(AnalyticProperties, ConditionalPdfIsDerivativeOfCcdf) {
  for (double phi : {0.4, 1.0, kPi / 2, 2.2, 3.0})
    for (double x : {0.3, 0.8})
      for (double y : {0.25, 0.6, 1.1, 1.6}) {
        const double h = 1e-5 * y;
        const double fd = -(analytic::conditional_ccdf(phi, x, y + h, 1.0) - analytic::conditional_ccdf(phi, x, y - h, 1.0)) /
                          (2 * h);
        const double pdf = analytic::conditional_pdf(phi, x, y, 1.0);
        EXPECT_NEAR(pdf, fd, 1e-6 * std::max(pdf, 1e-3)) << phi << " " << x << " " << y;
      }
}

TEST(AnalyticProperties, SecondMomentApproximationGap) {
  double worst = 0.0;
  for (int k = 0; k <= 24; ++k) {
    const double phi = kPi * k / 24;
    worst = std::max(worst, std::abs(analytic::zero_directional_moment(phi, 2, 1.0) -
                                     analytic::second_moment_approximation(phi, 1.0)));
  }
  RecordProperty("max_abs_gap", std::to_string(worst));
  EXPECT_LT(worst, 0.02);
  const auto m = analytic::mean_area_quadrature(1.0);
  EXPECT_NEAR(m.approximation - m.exact, 1.2869 - 1.2802, 1e-4);
}

TEST(AnalyticProperties, CcdfsAreMonotone) {
  for (double phi : {0.0, 1.0, kPi}) {
    double prev = 1.0;
    for (double y = 0.0; y <= 2.5; y += 0.1) {
      const double v = analytic::zero_directional_ccdf(phi, y, 1.0);
      EXPECT_LE(v, prev + 1e-12);
      prev = v;
    }
  }
}

TEST(StatsProperties, UniformRngPassesKs) {
  auto eng = make_engine(2024, 0);
  std::vector<double> u(100000);
  for (auto& x : u) x = uniform01(eng);
  const stats::EmpiricalDistribution d(u);
  EXPECT_LT(stats::ks_distance(d, [](double t) { return std::clamp(t, 0.0, 1.0); }),
            stats::kolmogorov_critical_value(u.size(), 0.001));
  // degenerate and exact cases
  const stats::EmpiricalDistribution constant(std::vector<double>(100, 0.5));
  EXPECT_GE(stats::ks_distance(constant, [](double t) { return std::clamp(t, 0.0, 1.0); }), 0.5);
  const stats::EmpiricalDistribution three({1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(three.ecdf(2.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(three.ecdf(0.0), 0.0);
  EXPECT_DOUBLE_EQ(three.ecdf(9.0), 1.0);
  EXPECT_DOUBLE_EQ(stats::mean(std::vector<double>{1, 2, 3}).value, 2.0);
}

TEST(StatsProperties, TypicalCellUniformAngleMoments) {
  std::vector<double> r;
  geometry::CellOptions opt;
  opt.grid = std::make_shared<const geometry::AngleGrid>(8);
  for (std::uint64_t i = 0; i < 20000; ++i) r.push_back(geometry::sample_typical_cell(1.0, 71, i, opt).uniform_angle_radius);
  const auto m1 = stats::moment(r, 1), m2 = stats::moment(r, 2);
  EXPECT_NEAR(m1.value, 0.5, 3.0 * m1.std_error);
  EXPECT_NEAR(m2.value, 1.0 / kPi, 3.0 * m2.std_error);
}

TEST(NetworkProperties, EdgePowerAndIntensityInvariance) {
  network::JspConfig a;
  a.truncation_radius = 4.0;
  network::JspConfig b = a;
  b.edge_power = 7.0;
  b.intensity = 3.0;
  b.truncation_radius = 4.0 / std::sqrt(3.0);
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto ra = network::build_realization(a, 6, r);
    const auto rb = network::build_realization(b, 6, r);
    for (double th : {0.1, 1.0, 10.0})
      ASSERT_NEAR(network::conditional_success(ra, th), network::conditional_success(rb, th), 1e-10);
  }
}

TEST(NetworkProperties, SmallThetaSlopeIsMisr) {
  network::JspConfig c;
  c.truncation_radius = 4.0;
  const std::vector<double> thetas{1e-3, std::pow(10.0, -2.5), 1e-2};
  const auto md = network::meta_distribution(c, thetas, std::vector<double>{0.5}, 2000, 9, {1});
  const auto g = network::estimate_gain(c, 2000, 9, {1});
  for (std::size_t i = 0; i < thetas.size(); ++i)
    EXPECT_NEAR((1.0 - md.m1[i].value) / thetas[i], g.misr.value, 0.1 * g.misr.value) << thetas[i];
}

TEST(NetworkProperties, TruncationHonesty) {
  network::JspConfig c;
  c.truncation_radius = 4.0;
  network::JspConfig d = c;
  d.truncation_radius = 8.0;
  const std::vector<double> th{1.0}, xs{0.5};
  const auto a = network::meta_distribution(c, th, xs, 500, 13, {1});
  const auto b = network::meta_distribution(d, th, xs, 500, 13, {1});
  EXPECT_LT(std::abs(a.m1[0].value - b.m1[0].value), 0.002);
}

TEST(NetworkProperties, MetaDistributionIsMonotone) {
  network::JspConfig c;
  c.truncation_radius = 4.0;
  c.shadowing_sigma = 1.0;
  const std::vector<double> th{0.1, 0.5, 1.0, 5.0}, xs{0.1, 0.5, 0.9};
  const auto md = network::meta_distribution(c, th, xs, 1000, 2, {1});
  for (std::size_t i = 0; i < th.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (i > 0) {
        EXPECT_LE(md.ccdf[i][j], md.ccdf[i - 1][j]);
      }
      if (j > 0) {
        EXPECT_LE(md.ccdf[i][j], md.ccdf[i][j - 1]);
      }
    }
}
