#pragma once

// Point-process sampling and Voronoi cell geometry: directional radii,
// polygons, areas and side counts for the typical cell and the zero-cell.
//
// Cells are built by clipping a bounding square with the perpendicular
// bisectors of the nucleus and its neighbours, taken in increasing distance.
// A neighbour at distance d from the nucleus can only cut the cell if
// d < 2 * (largest vertex distance), which bounds the work per cell and lets
// the Poisson points be generated lazily in radial order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pvt/errors.hpp"
#include "pvt/rng.hpp"
#include "pvt/vec2.hpp"

namespace pvt::geometry {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr std::size_t kDefaultPointBudget = 10'000'000;

// ---------------------------------------------------------------------------
// Point sets

/// Finite planar point pattern generated inside the disk of radius
/// `window_radius` centred at the origin.
class PointSet {
 public:
  PointSet(std::vector<Vec2> points, double window_radius, double intensity)
      : points_(std::move(points)), window_radius_(window_radius), intensity_(intensity) {
    pvt::detail::require(window_radius > 0.0, "PointSet: window radius must be positive");
    pvt::detail::require(intensity > 0.0, "PointSet: intensity must be positive");
    const double w2 = window_radius * window_radius * (1.0 + 1e-12);
    for (const auto& p : points_)
      pvt::detail::require(norm2(p) <= w2, "PointSet: point outside the window");
    check_coincident();
  }

  std::span<const Vec2> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Vec2& operator[](std::size_t i) const { return points_[i]; }
  double window_radius() const { return window_radius_; }
  double intensity() const { return intensity_; }

 private:
  void check_coincident() const {
    std::vector<Vec2> sorted(points_);
    std::sort(sorted.begin(), sorted.end(),
              [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    const double tol = 1e-12 * window_radius_;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      for (std::size_t j = i; j-- > 0;) {
        if (sorted[i].x - sorted[j].x > tol) break;
        if (std::abs(sorted[i].y - sorted[j].y) <= tol)
          throw CoincidentPointsError("PointSet: coincident points");
      }
    }
  }

  std::vector<Vec2> points_;
  double window_radius_;
  double intensity_;
};

/// Homogeneous Poisson points around `center`, produced in increasing
/// distance from it. lambda * pi * r_k^2 are the arrival times of a unit-rate
/// Poisson process and angles are iid uniform, so the first points up to any
/// radius W form a PPP restricted to the disk of radius W.
class RadialPointStream {
 public:
  RadialPointStream(Engine& eng, double intensity, double max_radius, Vec2 center = {})
      : eng_(&eng), intensity_(intensity), max_radius_(max_radius), center_(center) {
    pvt::detail::require(intensity > 0.0, "RadialPointStream: intensity must be positive");
  }

  /// Next point, or nullopt once the stream has passed `max_radius`.
  std::optional<Vec2> next() {
    if (exhausted_) return std::nullopt;
    area_ += exponential(*eng_, intensity_);
    radius_ = std::sqrt(area_ / std::numbers::pi);
    if (radius_ > max_radius_) {
      exhausted_ = true;
      return std::nullopt;
    }
    const double angle = kTwoPi * uniform01(*eng_);
    return center_ + radius_ * unit(angle);
  }

  /// Distance of the most recently generated point (or of the first point
  /// beyond the window once exhausted).
  double radius() const { return radius_; }
  bool exhausted() const { return exhausted_; }
  double max_radius() const { return max_radius_; }

 private:
  Engine* eng_;
  double intensity_;
  double max_radius_;
  Vec2 center_;
  double area_ = 0.0;
  double radius_ = 0.0;
  bool exhausted_ = false;
};

/// PPP of intensity `intensity` in the disk of radius `window_radius`. Points
/// come out sorted by distance from the origin; growing the window with the
/// same seed only appends points.
inline PointSet sample_ppp(double intensity, double window_radius, std::uint64_t seed,
                           std::uint64_t replicate = 0,
                           std::size_t point_budget = kDefaultPointBudget) {
  pvt::detail::require(intensity > 0.0 && std::isfinite(intensity), "sample_ppp: intensity must be positive");
  pvt::detail::require(window_radius > 0.0, "sample_ppp: window radius must be positive");
  const double expected = intensity * std::numbers::pi * window_radius * window_radius;
  if (expected > static_cast<double>(point_budget)) {
    std::ostringstream os;
    os << "sample_ppp: expected point count " << expected << " exceeds budget " << point_budget;
    throw ResourceError(os.str());
  }
  Engine eng = make_engine(seed, replicate);
  RadialPointStream stream(eng, intensity, window_radius);
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(expected + 6.0 * std::sqrt(expected) + 16.0));
  while (auto p = stream.next()) pts.push_back(*p);
  return PointSet(std::move(pts), window_radius, intensity);
}

/// Triangular lattice of density `intensity` with a uniformly random
/// translation (over one fundamental cell) and rotation, clipped to the disk.
inline double triangular_spacing(double intensity) {
  return std::sqrt(2.0 / (std::sqrt(3.0) * intensity));
}

inline PointSet triangular_lattice(double intensity, double window_radius, std::uint64_t seed,
                                   std::uint64_t replicate = 0, std::uint64_t attempt = 0) {
  pvt::detail::require(intensity > 0.0, "triangular_lattice: intensity must be positive");
  pvt::detail::require(window_radius > 0.0, "triangular_lattice: window radius must be positive");
  Engine eng = make_engine(seed, replicate, attempt);
  const double s = triangular_spacing(intensity);
  const Vec2 a1{s, 0.0};
  const Vec2 a2{0.5 * s, 0.5 * std::sqrt(3.0) * s};
  const Vec2 offset = uniform01(eng) * a1 + uniform01(eng) * a2;
  const double rot = kTwoPi * uniform01(eng);
  const double c = std::cos(rot), sn = std::sin(rot);
  const int n = static_cast<int>(std::ceil(window_radius / s * 2.0 / std::sqrt(3.0))) + 2;
  std::vector<Vec2> pts;
  const double w2 = window_radius * window_radius;
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      const Vec2 p = rotate(static_cast<double>(i) * a1 + static_cast<double>(j) * a2 + offset, c, sn);
      if (norm2(p) <= w2) pts.push_back(p);
    }
  }
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return norm2(a) < norm2(b); });
  return PointSet(std::move(pts), window_radius, intensity);
}

// ---------------------------------------------------------------------------
// Directional radius

/// Distance from the nucleus (at the origin) along unit vector `u` to the
/// bisector of the nucleus and neighbour `y`, or +inf if the bisector is not
/// hit (y.u <= 0). t*u is in the cell iff t <= |y|^2 / (2 u.y) for all y with
/// u.y > 0.
inline double bisector_distance(Vec2 y, Vec2 u) {
  const double proj = dot(y, u);
  if (proj <= 0.0) return std::numeric_limits<double>::infinity();
  return norm2(y) / (2.0 * proj);
}

/// Directional radius of the cell of a nucleus at the origin, given neighbour
/// positions relative to it. Throws TruncationError when no neighbour bounds
/// the ray or when the result is not certified by the window (points beyond
/// the window could only give values >= window_radius / 2).
inline double directional_radius(std::span<const Vec2> neighbors, Vec2 u, double window_radius) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& y : neighbors) best = std::min(best, bisector_distance(y, u));
  if (!std::isfinite(best)) throw TruncationError("directional_radius: ray is unbounded within the window");
  if (best >= 0.5 * window_radius)
    throw TruncationError("directional_radius: value not certified by the window");
  return best;
}

// ---------------------------------------------------------------------------
// Cell polygons

/// Convex Voronoi cell of a nucleus at the origin: counter-clockwise vertices
/// and, for each edge i (vertex i to i+1), the neighbour whose bisector
/// carries it.
struct CellGeometry {
  std::vector<Vec2> polygon;
  std::vector<Vec2> generators;
  double area = 0.0;
  int side_count = 0;
};

inline double shoelace_area(std::span<const Vec2> poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

/// Directional radius of a cell from its edge generators.
inline double radius_from_generators(std::span<const Vec2> generators, Vec2 u) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : generators) best = std::min(best, bisector_distance(g, u));
  return best;
}

/// Incremental half-plane clipper. Starts from the square of half-width
/// `half_width` around the nucleus; edges of that square carry no generator.
class CellClipper {
 public:
  explicit CellClipper(double half_width) {
    const double h = half_width;
    verts_ = {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
    tags_ = {kBox, kBox, kBox, kBox};
    max_dist2_ = 2.0 * h * h;
  }

  /// Clip by the bisector of the nucleus and neighbour `y` (relative
  /// position). Returns true if the cell changed.
  bool clip(Vec2 y) {
    const double c = 0.5 * norm2(y);
    // skip the clip entirely if every vertex is inside
    bool any_out = false;
    for (const auto& v : verts_)
      if (dot(y, v) > c) {
        any_out = true;
        break;
      }
    if (!any_out) return false;

    const auto tag = static_cast<std::int64_t>(gens_.size());
    gens_.push_back(y);
    std::vector<Vec2> nv;
    std::vector<std::int64_t> nt;
    nv.reserve(verts_.size() + 1);
    nt.reserve(verts_.size() + 1);
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 cur = verts_[i];
      const Vec2 nxt = verts_[(i + 1) % n];
      const double hc = dot(y, cur) - c;
      const double hn = dot(y, nxt) - c;
      const bool in_c = hc <= 0.0;
      const bool in_n = hn <= 0.0;
      if (in_c) {
        nv.push_back(cur);
        nt.push_back(tags_[i]);
        if (!in_n) {
          nv.push_back(cur + (hc / (hc - hn)) * (nxt - cur));
          nt.push_back(tag);
        }
      } else if (in_n) {
        nv.push_back(cur + (hc / (hc - hn)) * (nxt - cur));
        nt.push_back(tags_[i]);
      }
    }
    verts_ = std::move(nv);
    tags_ = std::move(nt);
    max_dist2_ = 0.0;
    for (const auto& v : verts_) max_dist2_ = std::max(max_dist2_, norm2(v));
    return true;
  }

  double max_vertex_distance() const { return std::sqrt(max_dist2_); }

  /// A neighbour at distance > 2 * max vertex distance cannot cut the cell.
  bool can_cut(double neighbor_distance) const {
    return neighbor_distance * neighbor_distance <= 4.0 * max_dist2_;
  }

  bool touches_box() const {
    return std::any_of(tags_.begin(), tags_.end(), [](auto t) { return t == kBox; });
  }

  /// Final cell; TruncationError if it still touches the bounding square.
  CellGeometry finish() const {
    if (touches_box()) throw TruncationError("cell_polygon: cell touches the bounding square");
    CellGeometry cell;
    // drop zero-length edges produced by clips passing through a vertex
    const double eps2 = 1e-24 * max_dist2_;
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      const Vec2 nxt = verts_[(i + 1) % verts_.size()];
      if (norm2(nxt - verts_[i]) <= eps2) continue;
      cell.polygon.push_back(verts_[i]);
      cell.generators.push_back(gens_[static_cast<std::size_t>(tags_[i])]);
    }
    cell.area = shoelace_area(cell.polygon);
    cell.side_count = static_cast<int>(cell.polygon.size());
    return cell;
  }

 private:
  static constexpr std::int64_t kBox = -1;
  std::vector<Vec2> verts_;
  std::vector<std::int64_t> tags_;
  std::vector<Vec2> gens_;
  double max_dist2_ = 0.0;
};

/// Voronoi cell of a nucleus at the origin from neighbours sorted by
/// distance. Clipping stops at the first neighbour farther than twice the
/// largest vertex distance. The bounding square has half-width
/// `window_radius`.
inline CellGeometry cell_polygon(std::span<const Vec2> neighbors_sorted, double window_radius) {
  CellClipper clipper(window_radius);
  for (const auto& y : neighbors_sorted) {
    if (!clipper.can_cut(norm(y))) break;
    clipper.clip(y);
  }
  return clipper.finish();
}

// ---------------------------------------------------------------------------
// Typical cell and zero-cell samples

/// Radii are recorded on a periodic grid of angles in [0, 2 pi).
class AngleGrid {
 public:
  /// `n` equally spaced angles plus exactly 0, pi/4, pi/2, 3pi/4 and pi.
  explicit AngleGrid(std::size_t n = 360) {
    pvt::detail::require(n >= 4, "AngleGrid: need at least 4 angles");
    constexpr double pi = std::numbers::pi;
    const double exact[] = {0.0, 0.25 * pi, 0.5 * pi, 0.75 * pi, pi};
    for (std::size_t k = 0; k < n; ++k) angles_.push_back(kTwoPi * static_cast<double>(k) / static_cast<double>(n));
    for (double e : exact) {
      auto it = std::find_if(angles_.begin(), angles_.end(),
                             [e](double a) { return std::abs(a - e) < 1e-12; });
      if (it != angles_.end())
        *it = e;
      else
        angles_.push_back(e);
    }
    std::sort(angles_.begin(), angles_.end());
  }

  std::span<const double> angles() const { return angles_; }
  std::size_t size() const { return angles_.size(); }

  /// Index of the angle closest to `phi` (mod 2 pi).
  std::size_t index_of(double phi) const {
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < angles_.size(); ++i) {
      const double d = std::min(std::abs(angles_[i] - phi), kTwoPi - std::abs(angles_[i] - phi));
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return best;
  }

 private:
  std::vector<double> angles_;
};

enum class CellKind { typical, zero };

/// One oriented cell observation. Coordinates are in the rotated frame: the
/// nucleus is at the origin and the anchor (the uniform point z for the
/// typical cell, the displaced origin for the zero-cell) lies on the positive
/// x-axis at `anchor_distance`.
struct CellSample {
  CellKind kind = CellKind::typical;
  std::shared_ptr<const AngleGrid> grid;
  std::vector<double> radii;  // radii[i] = R(grid->angles()[i])
  std::vector<Vec2> polygon;
  std::vector<Vec2> generators;
  double area = 0.0;
  int side_count = 0;
  double anchor_distance = 0.0;
  /// R at an independent uniformly random angle.
  double uniform_angle_radius = 0.0;
  /// Distance from the nucleus to the nearest point of the boundary.
  double nearest_edge_distance = 0.0;
  /// Realizations rejected by the truncation guard before this one.
  int discarded = 0;

  double radius_at(double phi) const { return radius_from_generators(generators, unit(phi)); }
};

struct CellOptions {
  /// Window radius in units of 1/sqrt(intensity).
  double window_factor = 12.0;
  std::shared_ptr<const AngleGrid> grid = std::make_shared<const AngleGrid>();
  int max_attempts = 64;
};

namespace detail {

inline double segment_distance_to_origin(Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double t = std::clamp(-dot(a, d) / norm2(d), 0.0, 1.0);
  return norm(a + t * d);
}

/// Uniform point in a convex CCW polygon that contains the origin, via an
/// area-weighted triangle fan from the origin.
inline Vec2 uniform_point_in_cell(std::span<const Vec2> poly, Engine& eng) {
  std::vector<double> cum(poly.size());
  double total = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    total += 0.5 * cross(poly[i], poly[(i + 1) % poly.size()]);
    cum[i] = total;
  }
  const double pick = uniform01(eng) * total;
  const std::size_t k = std::min<std::size_t>(
      static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), pick) - cum.begin()),
      poly.size() - 1);
  double s = uniform01(eng), t = uniform01(eng);
  if (s + t > 1.0) {
    s = 1.0 - s;
    t = 1.0 - t;
  }
  return s * poly[k] + t * poly[(k + 1) % poly.size()];
}

/// Fills a CellSample from a cell built around the origin, rotating by
/// `rotation` so the anchor lands on the positive x-axis.
inline CellSample orient(const CellGeometry& cell, double rotation, double anchor_distance,
                         CellKind kind, const CellOptions& opt, Engine& eng) {
  CellSample s;
  s.kind = kind;
  s.grid = opt.grid;
  const double c = std::cos(rotation), sn = std::sin(rotation);
  s.polygon.reserve(cell.polygon.size());
  s.generators.reserve(cell.generators.size());
  for (const auto& v : cell.polygon) s.polygon.push_back(rotate(v, c, sn));
  for (const auto& g : cell.generators) s.generators.push_back(rotate(g, c, sn));
  s.area = cell.area;
  s.side_count = cell.side_count;
  s.anchor_distance = anchor_distance;
  s.radii.reserve(opt.grid->size());
  for (double phi : opt.grid->angles()) s.radii.push_back(s.radius_at(phi));
  s.uniform_angle_radius = s.radius_at(kTwoPi * uniform01(eng));
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.polygon.size(); ++i)
    nearest = std::min(nearest, segment_distance_to_origin(s.polygon[i], s.polygon[(i + 1) % s.polygon.size()]));
  s.nearest_edge_distance = nearest;
  return s;
}

/// Builds the cell of `nucleus` from a radial stream centred at the origin.
/// Points already drawn are passed in `seen`. Later stream points are at
/// least (stream radius - |nucleus|) from the nucleus, which certifies
/// termination.
inline CellGeometry stream_cell(RadialPointStream& stream, Vec2 nucleus, std::vector<Vec2> seen,
                                double window_radius) {
  CellClipper clipper(window_radius);
  const double offset = norm(nucleus);
  std::sort(seen.begin(), seen.end(),
            [&](Vec2 a, Vec2 b) { return norm2(a - nucleus) < norm2(b - nucleus); });
  for (const auto& p : seen) clipper.clip(p - nucleus);
  while (true) {
    auto p = stream.next();
    if (!p) throw TruncationError("cell not certified within the sampling window");
    if (!clipper.can_cut(stream.radius() - offset)) break;
    clipper.clip(*p - nucleus);
  }
  return clipper.finish();
}

template <typename Attempt>
auto with_retries(int max_attempts, Attempt&& attempt) {
  for (int a = 0; a < max_attempts; ++a) {
    try {
      auto s = attempt(static_cast<std::uint64_t>(a));
      s.discarded = a;
      return s;
    } catch (const TruncationError&) {
    } catch (const CoincidentPointsError&) {
    }
  }
  throw TruncationError("no certified realization after the maximum number of attempts");
}

}  // namespace detail

/// Typical cell under the Palm distribution: the nucleus is the origin, a
/// location z is drawn uniformly in the cell and the cell is rotated by
/// -arg(z), so R(0) is the radius towards z and anchor_distance = |z| = D.
inline CellSample sample_typical_cell(double intensity, std::uint64_t seed, std::uint64_t replicate = 0,
                                      const CellOptions& opt = {}) {
  pvt::detail::require(intensity > 0.0, "sample_typical_cell: intensity must be positive");
  const double window = opt.window_factor / std::sqrt(intensity);
  return detail::with_retries(opt.max_attempts, [&](std::uint64_t attempt) {
    Engine eng = make_engine(seed, replicate, attempt);
    RadialPointStream stream(eng, intensity, window);
    const CellGeometry cell = detail::stream_cell(stream, Vec2{}, {}, window);
    const Vec2 z = detail::uniform_point_in_cell(cell.polygon, eng);
    const double zeta = std::atan2(z.y, z.x);
    return detail::orient(cell, -zeta, norm(z), CellKind::typical, opt, eng);
  });
}

/// Zero-cell: the cell of the point x0 nearest to the origin, translated by
/// -x0 and rotated by pi - arg(x0) so the former origin sits at (|x0|, 0).
inline CellSample sample_zero_cell(double intensity, std::uint64_t seed, std::uint64_t replicate = 0,
                                   const CellOptions& opt = {}) {
  pvt::detail::require(intensity > 0.0, "sample_zero_cell: intensity must be positive");
  const double window = opt.window_factor / std::sqrt(intensity);
  return detail::with_retries(opt.max_attempts, [&](std::uint64_t attempt) {
    Engine eng = make_engine(seed, replicate, attempt);
    RadialPointStream stream(eng, intensity, window);
    const auto x0 = stream.next();
    if (!x0) throw TruncationError("sample_zero_cell: empty window");
    const CellGeometry cell = detail::stream_cell(stream, *x0, {}, window);
    const double phi0 = std::atan2(x0->y, x0->x);
    return detail::orient(cell, std::numbers::pi - phi0, norm(*x0), CellKind::zero, opt, eng);
  });
}

// ---------------------------------------------------------------------------
// Cell radii towards a target

/// Radius of the cell of `points[bs]` towards `target` by a linear scan.
/// Certified only while the value is below (window - |bs|) / 2.
inline double cell_radius_toward(const PointSet& points, std::size_t bs, Vec2 target) {
  pvt::detail::require(bs < points.size(), "cell_radius_toward: index out of range");
  const Vec2 x = points[bs];
  const Vec2 d = target - x;
  const double len = norm(d);
  pvt::detail::require(len > 0.0, "cell_radius_toward: target coincides with the nucleus");
  const Vec2 u = (1.0 / len) * d;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < points.size(); ++j)
    if (j != bs) best = std::min(best, bisector_distance(points[j] - x, u));
  if (!std::isfinite(best) || best >= 0.5 * (points.window_radius() - norm(x)))
    throw TruncationError("cell_radius_toward: value not certified by the window");
  return best;
}

/// Uniform grid of buckets over a PointSet for local neighbour queries.
class SpatialIndex {
 public:
  explicit SpatialIndex(const PointSet& points, double bucket_size = 0.0)
      : points_(&points) {
    const double w = points.window_radius();
    h_ = bucket_size > 0.0 ? bucket_size : 1.0 / std::sqrt(points.intensity());
    n_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * w / h_)));
    origin_ = -w;
    start_.assign(n_ * n_ + 1, 0);
    for (const auto& p : points.points()) ++start_[bucket(p) + 1];
    for (std::size_t i = 1; i < start_.size(); ++i) start_[i] += start_[i - 1];
    items_.resize(points.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) items_[fill[bucket(points[i])]++] = i;
  }

  /// Radius of the cell of point `bs` towards `target`, searching buckets in
  /// rings of growing Chebyshev distance until no farther point can improve
  /// the value.
  double radius_toward(std::size_t bs, Vec2 target) const {
    const PointSet& pts = *points_;
    const Vec2 x = pts[bs];
    const Vec2 d = target - x;
    const double len = norm(d);
    pvt::detail::require(len > 0.0, "radius_toward: target coincides with the nucleus");
    const Vec2 u = (1.0 / len) * d;
    const auto [cx, cy] = cell_of(x);
    double best = std::numeric_limits<double>::infinity();
    const double limit = 0.5 * (pts.window_radius() - norm(x));
    for (std::size_t ring = 0;; ++ring) {
      // every point in ring k is at least (k - 1) * h away from x
      const double min_dist = ring == 0 ? 0.0 : (static_cast<double>(ring) - 1.0) * h_;
      if (0.5 * min_dist >= best) break;
      if (0.5 * min_dist >= limit) break;
      if (ring > n_) break;
      visit_ring(cx, cy, ring, [&](std::size_t j) {
        if (j != bs) best = std::min(best, bisector_distance(pts[j] - x, u));
      });
    }
    if (!std::isfinite(best) || best >= limit)
      throw TruncationError("radius_toward: value not certified by the window");
    return best;
  }

 private:
  std::pair<long, long> cell_of(Vec2 p) const {
    const long n = static_cast<long>(n_);
    const long ix = std::clamp(static_cast<long>(std::floor((p.x - origin_) / h_)), 0L, n - 1);
    const long iy = std::clamp(static_cast<long>(std::floor((p.y - origin_) / h_)), 0L, n - 1);
    return {ix, iy};
  }
  std::size_t bucket(Vec2 p) const {
    const auto [ix, iy] = cell_of(p);
    return static_cast<std::size_t>(iy) * n_ + static_cast<std::size_t>(ix);
  }

  template <typename F>
  void visit_bucket(long ix, long iy, F& f) const {
    const long n = static_cast<long>(n_);
    if (ix < 0 || iy < 0 || ix >= n || iy >= n) return;
    const std::size_t b = static_cast<std::size_t>(iy) * n_ + static_cast<std::size_t>(ix);
    for (std::size_t k = start_[b]; k < start_[b + 1]; ++k) f(items_[k]);
  }

  template <typename F>
  void visit_ring(long cx, long cy, std::size_t ring, F&& f) const {
    const long r = static_cast<long>(ring);
    if (r == 0) {
      visit_bucket(cx, cy, f);
      return;
    }
    for (long i = -r; i <= r; ++i) {
      visit_bucket(cx + i, cy - r, f);
      visit_bucket(cx + i, cy + r, f);
    }
    for (long i = -r + 1; i <= r - 1; ++i) {
      visit_bucket(cx - r, cy + i, f);
      visit_bucket(cx + r, cy + i, f);
    }
  }

  const PointSet* points_;
  double h_ = 1.0;
  double origin_ = 0.0;
  std::size_t n_ = 1;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

/// Distances |x_i| and radii r(x_i) towards the origin of the `count` points
/// of a PPP nearest to the origin (x_0 first).
struct OrderedRadii {
  std::vector<double> distance;
  std::vector<double> radius;
  int discarded = 0;
};

inline OrderedRadii sample_ordered_radii(double intensity, std::size_t count, std::uint64_t seed,
                                         std::uint64_t replicate = 0, int max_attempts = 64) {
  pvt::detail::require(intensity > 0.0 && count >= 1, "sample_ordered_radii: bad parameters");
  const double scale = 1.0 / std::sqrt(intensity);
  const double window = (12.0 + 2.0 * std::sqrt(static_cast<double>(count) / std::numbers::pi)) * scale;
  return detail::with_retries(max_attempts, [&](std::uint64_t attempt) {
    Engine eng = make_engine(seed, replicate, attempt);
    RadialPointStream stream(eng, intensity, window);
    std::vector<Vec2> pts;
    std::vector<Vec2> dirs;
    std::vector<double> best;
    while (true) {
      auto p = stream.next();
      if (!p) throw TruncationError("sample_ordered_radii: window too small");
      if (pts.size() >= count) {
        // points farther than |x_i| + 2 r(x_i) from the origin cannot cut
        double need = 0.0;
        for (std::size_t i = 0; i < count; ++i) need = std::max(need, norm(pts[i]) + 2.0 * best[i]);
        if (stream.radius() > need) break;
      }
      const std::size_t tracked = std::min(pts.size(), count);
      for (std::size_t i = 0; i < tracked; ++i)
        best[i] = std::min(best[i], bisector_distance(*p - pts[i], dirs[i]));
      if (pts.size() < count) {
        const Vec2 u = (-1.0 / norm(*p)) * *p;
        double b = std::numeric_limits<double>::infinity();
        for (const auto& q : pts) b = std::min(b, bisector_distance(q - *p, u));
        dirs.push_back(u);
        best.push_back(b);
      }
      pts.push_back(*p);
    }
    OrderedRadii out;
    for (std::size_t i = 0; i < count; ++i) {
      out.distance.push_back(norm(pts[i]));
      out.radius.push_back(best[i]);
    }
    return out;
  });
}

// ---------------------------------------------------------------------------
// One-dimensional PPP

/// Typical cell of a 1D PPP on the line: the nucleus at 0, cell
/// [-X_{-1}/2, X_1/2]; z uniform in the cell; R(0) is the half-gap on the
/// side of z, R(pi) the other one, D = |z|.
struct OneDimCell {
  double r0 = 0.0;
  double r_pi = 0.0;
  double d = 0.0;
};

inline OneDimCell sample_oned_typical_cell(double intensity, std::uint64_t seed, std::uint64_t replicate = 0) {
  pvt::detail::require(intensity > 0.0, "sample_oned_typical_cell: intensity must be positive");
  Engine eng = make_engine(seed, replicate);
  const double right = 0.5 * exponential(eng, intensity);
  const double left = 0.5 * exponential(eng, intensity);
  const double z = -left + uniform01(eng) * (left + right);
  if (z >= 0.0) return {right, left, z};
  return {left, right, -z};
}

}  // namespace pvt::geometry
