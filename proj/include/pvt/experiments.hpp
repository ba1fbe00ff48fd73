#pragma once

// Experiment runner: a JSON config names one experiment and its parameters;
// running it produces CSV tables and a JSON summary with estimates and
// oracle-comparison verdicts.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "pvt/analytic.hpp"
#include "pvt/errors.hpp"
#include "pvt/geometry.hpp"
#include "pvt/network.hpp"
#include "pvt/parallel.hpp"
#include "pvt/stats.hpp"

namespace pvt::experiments {

using json = nlohmann::ordered_json;

/// Invalid or unreadable experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  std::string reproduces;
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries{
      {"cell-moments", "Means of directional radii, anchor distance, side count and area of the typical and zero cells",
       "Table I; Figs. 2 and 4"},
      {"cell-distributions", "KS distances between sampled radius laws and their closed forms", "Figs. 5 and 6"},
      {"zero-cell-joint", "Joint law of D0 and R0(phi): correlation constant, ratio identities, mean area",
       "Figs. 3 and 4"},
      {"shadowing-laws", "Shadowing coefficients of the serving and first interfering BS", "Fig. 9"},
      {"serving-signal", "Serving mean received power versus the power law P0^delta t^-delta", "Fig. 8"},
      {"gain-sweep", "Asymptotic SIR gain over the standard PPP versus alpha and sigma", "Fig. 10"},
      {"meta-distribution", "SIR meta distribution and the moments M1, M2", "Figs. 12 and 13"},
      {"path-loss-convergence", "Intensity measure of the rescaled path-loss process as sigma grows",
       "path-loss process convergence (no figure)"},
      {"oned-appendix", "Directional radii of the typical cell of a 1D PPP", "1D PPP appendix (no figure)"},
  };
  return entries;
}

inline json catalog_json() {
  json out = json::array();
  for (const auto& e : catalog())
    out.push_back({{"name", e.name}, {"description", e.description}, {"reproduces", e.reproduces}});
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

struct ExperimentConfig {
  std::string experiment;
  double intensity = 1.0;
  double path_loss_exponent = 4.0;
  std::vector<double> alphas{2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
  double edge_power = 1.0;
  std::vector<double> sigmas{0.0};
  std::vector<double> theta_db{-10, -8, -6, -4, -2, 0, 2, 4, 6, 8, 10};
  std::vector<double> x_grid{0.5, 0.9, 0.99};
  std::vector<double> t_grid{0.5, 1.0, 2.0};
  std::string deployment = "ppp";
  std::string shadowing = "jsp";
  double truncation_radius = 0.0;
  std::uint64_t replicates = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output_dir = "out";

  json to_json() const {
    return {{"experiment", experiment},
            {"intensity", intensity},
            {"path_loss_exponent", path_loss_exponent},
            {"alphas", alphas},
            {"edge_power", edge_power},
            {"sigmas", sigmas},
            {"theta_db", theta_db},
            {"x_grid", x_grid},
            {"t_grid", t_grid},
            {"deployment", deployment},
            {"shadowing", shadowing},
            {"truncation_radius", truncation_radius},
            {"replicates", replicates},
            {"seed", seed},
            {"threads", threads},
            {"output_dir", output_dir}};
  }
};

namespace detail {

inline double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("field '" + key + "': expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("field '" + key + "': must be finite");
  return v;
}

inline std::uint64_t get_count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw ConfigError("field '" + key + "': expected a non-negative integer");
  return j.get<std::uint64_t>();
}

inline std::vector<double> get_list(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw ConfigError("field '" + key + "': expected a non-empty array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], key + "[" + std::to_string(i) + "]"));
  return v;
}

inline std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("field '" + key + "': expected a string");
  return j.get<std::string>();
}

}  // namespace detail

/// Checks values after parsing and overrides.
inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  bool known = false;
  for (const auto& e : catalog()) known = known || e.name == c.experiment;
  if (!known) fail("field 'experiment': unknown experiment '" + c.experiment + "'");
  if (!(c.intensity > 0.0)) fail("field 'intensity': must be positive");
  if (!(c.path_loss_exponent > 2.0)) fail("field 'path_loss_exponent': must exceed 2");
  for (double a : c.alphas)
    if (!(a > 2.0)) fail("field 'alphas': every value must exceed 2");
  if (!(c.edge_power > 0.0)) fail("field 'edge_power': must be positive");
  for (double s : c.sigmas)
    if (s < 0.0) fail("field 'sigmas': values must be non-negative");
  for (double x : c.x_grid)
    if (x < 0.0 || x > 1.0) fail("field 'x_grid': values must lie in [0, 1]");
  for (double t : c.t_grid)
    if (!(t > 0.0)) fail("field 't_grid': values must be positive");
  if (c.deployment != "ppp" && c.deployment != "triangular")
    fail("field 'deployment': expected 'ppp' or 'triangular'");
  if (c.shadowing != "jsp" && c.shadowing != "iid_lognormal" && c.shadowing != "none")
    fail("field 'shadowing': expected 'jsp', 'iid_lognormal' or 'none'");
  if (c.truncation_radius < 0.0) fail("field 'truncation_radius': must be non-negative");
  if (c.replicates < 1) fail("field 'replicates': must be at least 1");
  if (c.output_dir.empty()) fail("field 'output_dir': must be non-empty");
}

/// Parses a config document. Every key is optional except "experiment";
/// unknown keys are errors.
inline ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig c;
  if (!j.contains("experiment")) throw ConfigError("field 'experiment': required");
  static const std::set<std::string> keys{"experiment", "intensity", "path_loss_exponent", "alphas",
                                          "edge_power", "sigmas", "theta_db", "x_grid", "t_grid", "deployment",
                                          "shadowing", "truncation_radius", "replicates", "seed", "threads",
                                          "output_dir"};
  for (const auto& [k, v] : j.items()) {
    if (!keys.count(k)) throw ConfigError("field '" + k + "': unknown key");
    if (k == "experiment") c.experiment = detail::get_string(v, k);
    else if (k == "intensity") c.intensity = detail::get_number(v, k);
    else if (k == "path_loss_exponent") c.path_loss_exponent = detail::get_number(v, k);
    else if (k == "alphas") c.alphas = detail::get_list(v, k);
    else if (k == "edge_power") c.edge_power = detail::get_number(v, k);
    else if (k == "sigmas") c.sigmas = detail::get_list(v, k);
    else if (k == "theta_db") c.theta_db = detail::get_list(v, k);
    else if (k == "x_grid") c.x_grid = detail::get_list(v, k);
    else if (k == "t_grid") c.t_grid = detail::get_list(v, k);
    else if (k == "deployment") c.deployment = detail::get_string(v, k);
    else if (k == "shadowing") c.shadowing = detail::get_string(v, k);
    else if (k == "truncation_radius") c.truncation_radius = detail::get_number(v, k);
    else if (k == "replicates") c.replicates = detail::get_count(v, k);
    else if (k == "seed") c.seed = detail::get_count(v, k);
    else if (k == "threads") c.threads = static_cast<unsigned>(detail::get_count(v, k));
    else if (k == "output_dir") c.output_dir = detail::get_string(v, k);
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Output tables

/// Shortest decimal string that round-trips to the same double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Table {
 public:
  Table(std::string name, std::vector<std::string> columns)
      : name_(std::move(name)), columns_(std::move(columns)) {}

  struct Field {
    std::string text;
    Field(double v) : text(format_number(v)) {}
    Field(int v) : text(std::to_string(v)) {}
    Field(std::size_t v) : text(std::to_string(v)) {}
    Field(const char* s) : text(s) {}
    Field(std::string s) : text(std::move(s)) {}
  };

  void add(std::initializer_list<Field> row) {
    if (row.size() != columns_.size()) throw std::logic_error("Table: row width mismatch in " + name_);
    std::vector<std::string> r;
    for (const auto& f : row) r.push_back(f.text);
    rows_.push_back(std::move(r));
  }

  const std::string& name() const { return name_; }
  std::size_t rows() const { return rows_.size(); }

  /// CSV text; every row starts with the run's seed.
  std::string csv(std::uint64_t seed) const {
    std::ostringstream os;
    os << "seed";
    for (const auto& c : columns_) os << ',' << c;
    os << '\n';
    const std::string s = std::to_string(seed);
    for (const auto& r : rows_) {
      os << s;
      for (const auto& f : r) os << ',' << f;
      os << '\n';
    }
    return os.str();
  }

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct Verdict {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExperimentResult {
  std::vector<Table> tables;
  json estimates = json::object();
  std::vector<Verdict> verdicts;

  void check(std::string name, double value, double reference, double tolerance) {
    verdicts.push_back({std::move(name), value, reference, tolerance, std::abs(value - reference) <= tolerance});
  }
  void check_below(std::string name, double value, double bound) {
    verdicts.push_back({std::move(name), value, bound, 0.0, value < bound});
  }
};

inline json estimate_json(const stats::Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

namespace detail {

inline std::vector<double> db_to_linear(std::span<const double> db) {
  std::vector<double> v;
  for (double d : db) v.push_back(std::pow(10.0, d / 10.0));
  return v;
}

/// Runs `make(i)` for i in [0, n) in parallel chunks and feeds the records to
/// `consume` in index order, bounding memory for large n.
template <typename Record, typename Make, typename Consume>
void for_each_chunked(std::size_t n, Make&& make, Consume&& consume, Parallelism par) {
  constexpr std::size_t chunk = 8192;
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    const std::size_t m = std::min(chunk, n - lo);
    auto recs = parallel_map<Record>(m, [&](std::size_t k) { return make(lo + k); }, par);
    for (auto& r : recs) consume(r);
  }
}

inline network::JspConfig network_config(const ExperimentConfig& c, double alpha, double sigma) {
  network::JspConfig j;
  j.intensity = c.intensity;
  j.path_loss_exponent = alpha;
  j.edge_power = c.edge_power;
  j.shadowing_sigma = sigma;
  j.deployment = c.deployment == "ppp" ? network::Deployment::ppp : network::Deployment::triangular;
  j.shadowing_mode = c.shadowing == "jsp"             ? network::ShadowingMode::jsp
                     : c.shadowing == "iid_lognormal" ? network::ShadowingMode::iid_lognormal
                                                      : network::ShadowingMode::none;
  j.truncation_radius = c.truncation_radius;
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiments

inline ExperimentResult run_cell_moments(const ExperimentConfig& c, Parallelism par) {
  const double l = c.intensity;
  const auto grid = std::make_shared<const geometry::AngleGrid>();
  geometry::CellOptions opt;
  opt.grid = grid;
  struct Rec {
    std::vector<double> radii;
    double anchor = 0, area = 0, sides = 0;
    int discarded = 0;
  };
  ExperimentResult res;
  Table dir("directional_moments", {"phi", "typical_mean", "typical_second_moment", "zero_mean",
                                    "zero_second_moment", "zero_second_moment_approximation"});
  Table tab("moments", {"cell", "quantity", "estimate", "std_error", "reference"});
  std::vector<std::vector<stats::MomentAccumulator>> by_angle(2, std::vector<stats::MomentAccumulator>(grid->size()));
  std::vector<std::vector<stats::MomentAccumulator>> by_angle2(2, std::vector<stats::MomentAccumulator>(grid->size()));
  json est = json::object();
  const double s = 1.0 / std::sqrt(l);
  for (int kind = 0; kind < 2; ++kind) {
    stats::MomentAccumulator anchor, area, sides;
    int discarded = 0;
    detail::for_each_chunked<Rec>(
        c.replicates,
        [&](std::size_t i) {
          const auto cs = kind == 0 ? geometry::sample_typical_cell(l, c.seed, i, opt)
                                    : geometry::sample_zero_cell(l, c.seed + 1, i, opt);
          return Rec{cs.radii, cs.anchor_distance, cs.area, static_cast<double>(cs.side_count), cs.discarded};
        },
        [&](const Rec& r) {
          for (std::size_t k = 0; k < r.radii.size(); ++k) {
            by_angle[kind][k].add(r.radii[k]);
            by_angle2[kind][k].add(r.radii[k] * r.radii[k]);
          }
          anchor.add(r.anchor);
          area.add(r.area);
          sides.add(r.sides);
          discarded += r.discarded;
        },
        par);
    const std::string cell = kind == 0 ? "typical" : "zero";
    auto est_of = [&](const stats::MomentAccumulator& m) {
      return c.replicates >= 2 ? m.mean_estimate() : stats::Estimate{m.mean(), std::nan("")};
    };
    const auto r0 = est_of(by_angle[kind][grid->index_of(0.0)]);
    const auto rpi = est_of(by_angle[kind][grid->index_of(std::numbers::pi)]);
    const auto d = est_of(anchor), a = est_of(area), n = est_of(sides);
    const double ref_r0 = kind == 0 ? 0.67 * s : 0.75 * s;
    const double ref_rpi = kind == 0 ? 0.432 * s : 0.5 * s;
    const double ref_d = kind == 0 ? 0.447 * s : 0.5 * s;
    const double ref_a = kind == 0 ? 1.0 / l : 1.280176 / l;
    const double ref_n = kind == 0 ? 6.0 : 6.41;
    tab.add({cell, "R(0)", r0.value, r0.std_error, ref_r0});
    tab.add({cell, "R(pi)", rpi.value, rpi.std_error, ref_rpi});
    tab.add({cell, "anchor_distance", d.value, d.std_error, ref_d});
    tab.add({cell, "side_count", n.value, n.std_error, ref_n});
    tab.add({cell, "area", a.value, a.std_error, ref_a});
    est[cell] = {{"R(0)", estimate_json(r0)},       {"R(pi)", estimate_json(rpi)},
                 {"anchor_distance", estimate_json(d)}, {"side_count", estimate_json(n)},
                 {"area", estimate_json(a)},         {"discarded", discarded}};
    const double tol = kind == 0 ? 0.01 : 0.005;
    res.check(cell + " E R(0)", r0.value, ref_r0, tol * s);
    res.check(cell + " E R(pi)", rpi.value, ref_rpi, tol * s);
    res.check(cell + " E anchor distance", d.value, ref_d, tol * s);
    res.check(cell + " E side count", n.value, ref_n, kind == 0 ? 0.02 : 0.05);
    res.check(cell + " E area", a.value, ref_a, (kind == 0 ? 0.005 : 0.01) / l);
  }
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const double phi = grid->angles()[k];
    const double folded = phi <= std::numbers::pi ? phi : 2.0 * std::numbers::pi - phi;
    dir.add({phi, by_angle[0][k].mean(), by_angle2[0][k].mean(), by_angle[1][k].mean(), by_angle2[1][k].mean(),
             analytic::second_moment_approximation(folded, l)});
  }
  res.estimates = est;
  res.tables.push_back(std::move(tab));
  res.tables.push_back(std::move(dir));
  return res;
}

inline ExperimentResult run_cell_distributions(const ExperimentConfig& c, Parallelism par) {
  using analytic::DistributionSpec;
  using analytic::Family;
  const double l = c.intensity;
  struct Rec {
    double rbar = 0, r0 = 0, rpi = 0, gap = 0, rbar0 = 0, ratio0 = 0, rmin = 0;
    std::array<double, 3> ordered{};
  };
  std::vector<double> rbar, r0, rpi, gap, rbar0, ratio0, rmin, o1, o2, o3;
  detail::for_each_chunked<Rec>(
      c.replicates,
      [&](std::size_t i) {
        const auto t = geometry::sample_typical_cell(l, c.seed, i);
        const auto z = geometry::sample_zero_cell(l, c.seed + 1, i);
        const auto o = geometry::sample_ordered_radii(l, 4, c.seed + 2, i);
        Rec r;
        r.rbar = t.uniform_angle_radius;
        r.rmin = t.nearest_edge_distance;
        r.r0 = z.radius_at(0.0);
        r.rpi = z.radius_at(std::numbers::pi);
        r.gap = r.r0 - z.anchor_distance;
        r.rbar0 = z.uniform_angle_radius;
        r.ratio0 = z.anchor_distance / r.r0;
        for (int k = 1; k <= 3; ++k) r.ordered[k - 1] = o.radius[k] / o.distance[k];
        return r;
      },
      [&](const Rec& r) {
        rbar.push_back(r.rbar);
        r0.push_back(r.r0);
        rpi.push_back(r.rpi);
        gap.push_back(r.gap);
        rbar0.push_back(r.rbar0);
        ratio0.push_back(r.ratio0);
        rmin.push_back(r.rmin);
        o1.push_back(r.ordered[0]);
        o2.push_back(r.ordered[1]);
        o3.push_back(r.ordered[2]);
      },
      par);
  struct Law {
    std::string name;
    std::vector<double>* samples;
    DistributionSpec spec;
  };
  std::vector<Law> laws{
      {"typical_uniform_angle", &rbar, {Family::typical_uniform_angle, l}},
      {"zero_r0_0", &r0, {Family::zero_r0_0, l}},
      {"zero_r0_pi", &rpi, {Family::zero_r0_pi, l}},
      {"zero_gap", &gap, {Family::zero_gap, l}},
      {"zero_uniform_angle", &rbar0, {Family::zero_uniform_angle, l}},
      {"ratio_law", &ratio0, {Family::ratio_law, l}},
      {"ordered_ratio_law_1", &o1, {Family::ordered_ratio_law, l, 0.0, 1}},
      {"ordered_ratio_law_2", &o2, {Family::ordered_ratio_law, l, 0.0, 2}},
      {"ordered_ratio_law_3", &o3, {Family::ordered_ratio_law, l, 0.0, 3}},
      {"rmin", &rmin, {Family::rmin, l}},
  };
  ExperimentResult res;
  Table ks("ks", {"law", "samples", "ks_distance", "critical_value_0.001"});
  Table ecdf("ecdf", {"law", "y", "empirical_cdf", "analytic_cdf"});
  const std::size_t n = c.replicates;
  const double crit = stats::kolmogorov_critical_value(n, 0.001);
  constexpr int kGrid = 64;
  for (auto& law : laws) {
    const stats::EmpiricalDistribution dist(std::move(*law.samples));
    const double upper = std::min(analytic::support_upper(law.spec), dist.quantile(1.0) * 1.05);
    std::function<double(double)> cdf;
    if (law.spec.family == Family::zero_uniform_angle) {
      auto table = std::make_shared<analytic::TabulatedCdf>(
          [&](double y) { return analytic::cdf(law.spec, y); }, analytic::support_upper(law.spec) / 1.5, 1200);
      cdf = [table](double y) { return (*table)(y); };
    } else {
      cdf = [&law](double y) { return analytic::cdf(law.spec, y); };
    }
    const double d = stats::ks_distance(dist, cdf);
    ks.add({law.name, n, d, crit});
    res.estimates["ks"][law.name] = d;
    res.check_below("KS " + law.name, d, 0.005);
    for (int k = 1; k <= kGrid; ++k) {
      const double y = upper * k / kGrid;
      ecdf.add({law.name, y, dist.ecdf(y), cdf(y)});
    }
  }
  res.tables.push_back(std::move(ks));
  res.tables.push_back(std::move(ecdf));
  return res;
}

inline ExperimentResult run_zero_cell_joint(const ExperimentConfig& c, Parallelism par) {
  const double l = c.intensity;
  struct Rec {
    double d0 = 0, r0 = 0, rpi = 0;
  };
  std::vector<double> d0, r0, rpi, gap, ratio;
  detail::for_each_chunked<Rec>(
      c.replicates,
      [&](std::size_t i) {
        const auto z = geometry::sample_zero_cell(l, c.seed, i);
        return Rec{z.anchor_distance, z.radius_at(0.0), z.radius_at(std::numbers::pi)};
      },
      [&](const Rec& r) {
        d0.push_back(r.d0);
        r0.push_back(r.r0);
        rpi.push_back(r.rpi);
        gap.push_back(r.r0 - r.d0);
        ratio.push_back((r.r0 - r.d0) / r.d0);
      },
      par);
  ExperimentResult res;
  const auto rho = stats::correlation(d0, gap);
  const auto rho_r0 = stats::correlation(r0, gap);
  const auto ratio_mean = stats::mean(ratio);
  const double ratio_trimmed = stats::trimmed_mean(ratio, 1e-5);
  const auto ratio_of_means = stats::ratio_of_means(gap, d0);
  const auto indep = stats::correlation(d0, rpi);
  const auto area = analytic::mean_area_quadrature(l);
  res.estimates = {{"correlation_d0_gap", estimate_json(rho)},
                   {"correlation_r0_gap", estimate_json(rho_r0)},
                   {"correlation_constant", analytic::d0_gap_correlation()},
                   {"mean_gap_over_d0", estimate_json(ratio_mean)},
                   {"mean_gap_over_d0_trimmed", ratio_trimmed},
                   {"mean_gap_over_mean_d0", estimate_json(ratio_of_means)},
                   {"correlation_d0_r0_pi", estimate_json(indep)},
                   {"mean_area_quadrature", area.exact},
                   {"mean_area_approximation", area.approximation}};
  res.check("correlation of D0 and R0(0)-D0", rho.value, analytic::d0_gap_correlation(), 0.005);
  res.check("E[(R0(0)-D0)/D0]", ratio_mean.value, 1.0, 0.02);
  res.check("E[R0(0)-D0]/E[D0]", ratio_of_means.value, 0.5, 0.01);
  res.check("correlation of D0 and R0(pi)", indep.value, 0.0, 0.005);
  res.check("mean zero-cell area by quadrature", area.exact * l, 1.2802, 0.0005);
  res.check("mean zero-cell area approximation", area.approximation * l, 1.2869, 5e-5);

  Table joint("joint_pdf", {"phi", "x", "y", "pdf"});
  const double s = 1.0 / std::sqrt(l);
  for (double phi : {0.0, std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4, std::numbers::pi})
    for (int i = 1; i <= 20; ++i)
      for (int k = 1; k <= 20; ++k) {
        const double x = 0.1 * i * s, y = 0.1 * k * s;
        const double f = (phi == 0.0 && y < x) ? 0.0 : analytic::zero_cell_joint_pdf(phi, x, y, l);
        joint.add({phi, x, y, f});
      }
  Table mom("second_moment", {"phi", "quadrature", "approximation"});
  for (int k = 0; k <= 12; ++k) {
    const double phi = std::numbers::pi * k / 12;
    mom.add({phi, analytic::zero_directional_moment(phi, 2, l), analytic::second_moment_approximation(phi, l)});
  }
  res.tables.push_back(std::move(joint));
  res.tables.push_back(std::move(mom));
  return res;
}

inline ExperimentResult run_shadowing_laws(const ExperimentConfig& c, Parallelism par) {
  const double l = c.intensity, a = c.path_loss_exponent, p0 = c.edge_power;
  ExperimentResult res;
  Table t("shadowing_ccdf", {"sigma", "t", "serving_empirical", "interferer_empirical", "serving_analytic",
                             "interferer_analytic"});
  const auto m = analytic::shadowing_moments(l, p0, a);
  for (double sigma : c.sigmas) {
    struct Rec {
      double k0 = 0, k1 = 0;
    };
    std::vector<double> k0, k1;
    detail::for_each_chunked<Rec>(
        c.replicates,
        [&](std::size_t i) {
          const auto o = geometry::sample_ordered_radii(l, 2, c.seed, i);
          Engine eng = make_engine(c.seed ^ 0x5bd1e995ULL, i);
          std::normal_distribution<double> g;
          const double ln0 = std::exp(sigma * g(eng) - 0.5 * sigma * sigma);
          const double ln1 = std::exp(sigma * g(eng) - 0.5 * sigma * sigma);
          return Rec{p0 * std::pow(o.radius[0], a) * ln0, p0 * std::pow(o.radius[1], a) * ln1};
        },
        [&](const Rec& r) {
          k0.push_back(r.k0);
          k1.push_back(r.k1);
        },
        par);
    const auto e0 = stats::mean(k0), e1 = stats::mean(k1);
    const std::string key = "sigma=" + format_number(sigma);
    res.estimates[key] = {{"mean_serving", estimate_json(e0)}, {"mean_interferer", estimate_json(e1)}};
    const stats::EmpiricalDistribution d0(std::move(k0)), d1(std::move(k1));
    using analytic::ShadowingRole;
    if (sigma == 0.0) {
      const double ks0 = stats::ks_distance(
          d0, [&](double x) { return 1.0 - analytic::shadowing_ccdf(ShadowingRole::serving, x, l, p0, a); });
      const double ks1 = stats::ks_distance(
          d1, [&](double x) { return 1.0 - analytic::shadowing_ccdf(ShadowingRole::interferer, x, l, p0, a); });
      res.estimates[key]["ks_serving"] = ks0;
      res.estimates[key]["ks_interferer"] = ks1;
      res.check_below("KS serving shadowing", ks0, 0.005);
      res.check_below("KS interferer shadowing", ks1, 0.005);
      res.check("E K serving", e0.value, m.mean_serving, 0.05 * m.mean_serving / 6.0);
      res.check("E K interferer", e1.value, m.mean_interferer, 0.02 * m.mean_interferer / 2.0);
    }
    const double top = 4.0 * m.mean_serving;
    for (int k = 1; k <= 100; ++k) {
      const double x = top * k / 100;
      const double a0 = sigma == 0.0 ? analytic::shadowing_ccdf(ShadowingRole::serving, x, l, p0, a) : std::nan("");
      const double a1 = sigma == 0.0 ? analytic::shadowing_ccdf(ShadowingRole::interferer, x, l, p0, a) : std::nan("");
      t.add({sigma, x, d0.ccdf(x), d1.ccdf(x), a0, a1});
    }
  }
  res.estimates["analytic"] = {{"mean_serving", m.mean_serving},
                               {"mean_interferer", m.mean_interferer},
                               {"var_serving", m.var_serving},
                               {"var_interferer", m.var_interferer}};
  res.tables.push_back(std::move(t));
  return res;
}

inline ExperimentResult run_serving_signal(const ExperimentConfig& c, Parallelism par) {
  ExperimentResult res;
  const double a = c.path_loss_exponent, delta = 2.0 / a;
  Table t("serving_signal", {"deployment", "sigma", "t", "empirical_ccdf", "analytic_ccdf"});
  for (const std::string dep : {"ppp", "triangular"}) {
    for (double sigma : c.sigmas) {
      auto cfg = detail::network_config(c, a, sigma);
      cfg.deployment = dep == "ppp" ? network::Deployment::ppp : network::Deployment::triangular;
      cfg.shadowing_mode = network::ShadowingMode::jsp;
      // the lattice comparison uses P0 = (lambda pi)^{1/delta}
      if (dep == "triangular") cfg.edge_power = std::pow(c.intensity * std::numbers::pi, 1.0 / delta);
      if (c.truncation_radius == 0.0) cfg.truncation_radius = 3.0 / std::sqrt(c.intensity);
      const auto p = network::simulate<double>(
          cfg, c.replicates, c.seed, [](const network::NetworkRealization& r) { return r.serving_power(); }, par);
      const stats::EmpiricalDistribution dist(p);
      const double p0 = cfg.edge_power;
      const std::string key = dep + " sigma=" + format_number(sigma);
      if (sigma == 0.0) {
        const double d =
            stats::ks_distance(dist, [&](double x) { return 1.0 - analytic::serving_signal_ccdf(x, p0, a); });
        res.estimates[key]["ks"] = d;
        res.check_below("KS serving signal " + dep, d, dep == "ppp" ? 0.005 : 0.02);
      }
      for (int k = 0; k <= 80; ++k) {
        const double x = p0 * std::pow(10.0, 0.05 * k);
        t.add({dep, sigma, x, dist.ccdf(x), sigma == 0.0 ? analytic::serving_signal_ccdf(x, p0, a) : std::nan("")});
      }
    }
  }
  res.tables.push_back(std::move(t));
  return res;
}

inline ExperimentResult run_gain_sweep(const ExperimentConfig& c, Parallelism par) {
  ExperimentResult res;
  Table t("gain", {"alpha", "sigma", "deployment", "shadowing", "misr", "misr_std_error", "misr_median_of_means",
                   "far_field_term", "gain_db", "gain_db_std_error", "gain_db_median_of_means"});
  if (c.replicates < network::kMedianOfMeansBatches)
    throw ParameterError("gain-sweep needs at least 32 replicates");
  for (double a : c.alphas) {
    for (double sigma : c.sigmas) {
      const auto cfg = detail::network_config(c, a, sigma);
      const auto g = network::estimate_gain(cfg, c.replicates, c.seed, par);
      t.add({a, sigma, c.deployment, c.shadowing, g.misr.value, g.misr.std_error, g.misr_median_of_means,
             g.far_field_term, g.gain_db.value, g.gain_db.std_error, g.gain_db_median_of_means});
      res.estimates["alpha=" + format_number(a) + " sigma=" + format_number(sigma)] = {
          {"misr", estimate_json(g.misr)}, {"gain_db", estimate_json(g.gain_db)}, {"discarded", g.discarded}};
      if (a == 4.0 && c.deployment == "triangular" && c.shadowing == "none")
        res.check("triangular lattice gain at alpha=4 [dB]", g.gain_db.value, 3.4, 0.15);
      if (a == 4.0 && c.deployment == "ppp" && c.shadowing == "none")
        res.check("standard PPP MISR at alpha=4", g.misr.value, 1.0, 0.01);
    }
  }
  res.tables.push_back(std::move(t));
  return res;
}

inline ExperimentResult run_meta_distribution(const ExperimentConfig& c, Parallelism par) {
  ExperimentResult res;
  const double a = c.path_loss_exponent;
  const auto thetas = detail::db_to_linear(c.theta_db);
  Table md("meta_distribution", {"sigma", "theta_db", "x", "ccdf"});
  Table mom("moments", {"sigma", "theta_db", "m1", "m1_std_error", "m2", "m2_std_error", "ppp_m1", "ppp_m2"});
  for (double sigma : c.sigmas) {
    const auto cfg = detail::network_config(c, a, sigma);
    const auto out = network::meta_distribution(cfg, thetas, c.x_grid, c.replicates, c.seed, par);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      for (std::size_t j = 0; j < c.x_grid.size(); ++j) md.add({sigma, c.theta_db[i], c.x_grid[j], out.ccdf[i][j]});
      const double b1 = analytic::standard_ppp_moment(1.0, thetas[i], a);
      const double b2 = analytic::standard_ppp_moment(2.0, thetas[i], a);
      mom.add({sigma, c.theta_db[i], out.m1[i].value, out.m1[i].std_error, out.m2[i].value, out.m2[i].std_error, b1, b2});
      if (c.deployment == "ppp" && (c.shadowing == "none" || c.shadowing == "iid_lognormal")) {
        const std::string at = " at " + format_number(c.theta_db[i]) + " dB, sigma=" + format_number(sigma);
        res.check("M1 vs standard PPP" + at, out.m1[i].value, b1, std::max(3.0 * out.m1[i].std_error, 1e-12));
        res.check("M2 vs standard PPP" + at, out.m2[i].value, b2, std::max(3.0 * out.m2[i].std_error, 1e-12));
      }
    }
  }
  res.tables.push_back(std::move(md));
  res.tables.push_back(std::move(mom));
  return res;
}

inline ExperimentResult run_path_loss_convergence(const ExperimentConfig& c, Parallelism par) {
  ExperimentResult res;
  Table t("intensity_measure", {"sigma", "t", "simulated", "simulated_std_error", "far_field", "total", "total_over_t2"});
  Table f("first_point", {"sigma", "ks_distance_to_limit"});
  for (double sigma : c.sigmas) {
    auto cfg = detail::network_config(c, c.path_loss_exponent, sigma);
    cfg.deployment = network::Deployment::ppp;
    cfg.shadowing_mode = network::ShadowingMode::jsp;
    const auto pts = network::path_loss_intensity(cfg, c.t_grid, c.replicates, c.seed, par);
    for (const auto& p : pts) {
      t.add({sigma, p.t, p.simulated.value, p.simulated.std_error, p.far_field, p.total, p.total / (p.t * p.t)});
      res.check("Lambda([0,t))/t^2 at t=" + format_number(p.t) + ", sigma=" + format_number(sigma),
                p.total / (p.t * p.t), 1.0, sigma == 0.0 ? 0.02 : 0.05);
    }
    // first point of the rescaled process on the distance scale versus the
    // limiting law 1 - exp(-t^2)
    const double alpha = c.path_loss_exponent;
    const auto first = network::simulate<double>(
        cfg, c.replicates, c.seed,
        [&](const network::NetworkRealization& r) {
          return std::pow(network::path_loss_process(r, true).front(), 1.0 / alpha);
        },
        par);
    const stats::EmpiricalDistribution dist(first);
    const double d = stats::ks_distance(dist, [](double x) { return -std::expm1(-x * x); });
    f.add({sigma, d});
    res.estimates["first_point_ks"]["sigma=" + format_number(sigma)] = d;
  }
  res.tables.push_back(std::move(t));
  res.tables.push_back(std::move(f));
  return res;
}

inline ExperimentResult run_oned_appendix(const ExperimentConfig& c, Parallelism par) {
  ExperimentResult res;
  const double l = c.intensity;
  const auto cells = parallel_map<geometry::OneDimCell>(
      c.replicates, [&](std::size_t i) { return geometry::sample_oned_typical_cell(l, c.seed, i); }, par);
  std::vector<double> rpi, r0;
  for (const auto& x : cells) {
    rpi.push_back(x.r_pi);
    r0.push_back(x.r0);
  }
  const auto m_pi = stats::mean(rpi), m_0 = stats::mean(r0);
  const stats::EmpiricalDistribution dist(std::move(rpi));
  const double d = stats::ks_distance(dist, [&](double r) { return analytic::oned_r_pi_cdf(r, l); });
  res.estimates = {{"mean_r_pi", estimate_json(m_pi)}, {"mean_r0", estimate_json(m_0)}, {"ks_r_pi", d}};
  res.check_below("KS 1D R(pi)", d, 0.005);
  res.check("1D E R(pi)", m_pi.value * l, 1.0 / 3.0, 0.003);
  res.check("1D E R(0)", m_0.value * l, 2.0 / 3.0, 0.003);
  Table t("oned_cdf", {"r", "empirical_cdf", "analytic_cdf", "analytic_pdf"});
  for (int k = 1; k <= 100; ++k) {
    const double r = 2.0 * k / 100 / l;
    t.add({r, dist.ecdf(r), analytic::oned_r_pi_cdf(r, l), analytic::oned_r_pi_pdf(r, l)});
  }
  res.tables.push_back(std::move(t));
  return res;
}

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  validate(c);
  const Parallelism par{c.threads};
  const std::map<std::string, std::function<ExperimentResult(const ExperimentConfig&, Parallelism)>> table{
      {"cell-moments", run_cell_moments},
      {"cell-distributions", run_cell_distributions},
      {"zero-cell-joint", run_zero_cell_joint},
      {"shadowing-laws", run_shadowing_laws},
      {"serving-signal", run_serving_signal},
      {"gain-sweep", run_gain_sweep},
      {"meta-distribution", run_meta_distribution},
      {"path-loss-convergence", run_path_loss_convergence},
      {"oned-appendix", run_oned_appendix},
  };
  return table.at(c.experiment)(c, par);
}

// ---------------------------------------------------------------------------
// Artifacts

namespace detail {

/// Writes all files to temporaries first and renames them only once every
/// write succeeded, so a failed run leaves no partial outputs.
inline void write_atomically(const std::filesystem::path& dir,
                             const std::vector<std::pair<std::string, std::string>>& files) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> temps;
  try {
    for (const auto& [name, content] : files) {
      const fs::path tmp = dir / ("." + name + ".tmp");
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      temps.push_back(tmp);
      out << content;
      out.close();
      if (!out) throw std::runtime_error("failed to write " + tmp.string());
    }
    for (std::size_t i = 0; i < files.size(); ++i) fs::rename(temps[i], dir / files[i].first);
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
}

}  // namespace detail

/// Runs the experiment and writes <table>.csv files plus summary.json into
/// the configured output directory. Returns the summary.
inline json run_and_write(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  const auto result = run_experiment(c);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json verdicts = json::array();
  bool all = true;
  for (const auto& v : result.verdicts) {
    verdicts.push_back(
        {{"name", v.name}, {"value", v.value}, {"reference", v.reference}, {"tolerance", v.tolerance}, {"pass", v.pass}});
    all = all && v.pass;
  }
  json summary = {{"experiment", c.experiment},
                  {"parameters", c.to_json()},
                  {"seed", c.seed},
                  {"replicates", c.replicates},
                  {"runtime_seconds", seconds},
                  {"estimates", result.estimates},
                  {"verdicts", verdicts},
                  {"all_verdicts_pass", all}};
  std::vector<std::pair<std::string, std::string>> files;
  json tables = json::array();
  for (const auto& t : result.tables) {
    files.emplace_back(t.name() + ".csv", t.csv(c.seed));
    tables.push_back({{"file", t.name() + ".csv"}, {"rows", t.rows()}});
  }
  summary["tables"] = tables;
  files.emplace_back("summary.json", summary.dump(2) + "\n");
  detail::write_atomically(c.output_dir, files);
  return summary;
}

}  // namespace pvt::experiments
