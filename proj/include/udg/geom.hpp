// Numeric kernel for additively-weighted distances and bisector curves.
//
// A weighted site s with weight w measures a point p by d(s, p) = |s - p| + w.
// The locus of points equidistant (in that sense) to two sites is one branch of
// a hyperbola whose foci are the sites, a straight line when the weights agree,
// or nothing at all when one site dominates the other everywhere.
//
// Every branch is kept in a canonical frame: origin at the midpoint of the two
// sites, u-axis pointing from the lower-id site to the higher-id site. In that
// frame the branch is
//
//     u(t) = (dw / 2) cosh t,   v(t) = b sinh t,   b = sqrt(c^2 - (dw/2)^2)
//
// with c half the focal distance and dw = w_hi - w_lo. The parameter t is
// strictly monotone along the curve, which is what contour tracing walks on.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace udg {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double k, Point a) { return {k * a.x, k * a.y}; }
  friend Point operator*(Point a, double k) { return {k * a.x, k * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline Point perp(Point a) { return {-a.y, a.x}; }

enum class ErrorCode {
  CoincidentSites,
  EmptyBisector,
  NearTangency,
  OffCurve,
  SiteAboveLine,
  EmptyInput,
  DuplicateId,
  QueryBelowLine,
  TraceStall,
  DegenerateTangency,
  EmptyStructure,
  QueryBeforeAnyInsert,
  UnknownSource,
  NotSeparated,
  ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct WeightedSite {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;

  Point pos() const { return {x, y}; }
  friend bool operator==(const WeightedSite&, const WeightedSite&) = default;
};

// Relative tolerance used by every predicate in the library.
inline constexpr double kTolerance = 1e-9;

inline double weighted_distance(const WeightedSite& s, Point p) {
  const double dx = p.x - s.x;
  const double dy = p.y - s.y;
  return std::sqrt(dx * dx + dy * dy) + s.w;
}

// d(a, p) - d(b, p) without the cancellation of subtracting two distances.
inline double distance_difference(const WeightedSite& a, const WeightedSite& b, Point p) {
  const double ra = std::hypot(p.x - a.x, p.y - a.y);
  const double rb = std::hypot(p.x - b.x, p.y - b.y);
  const double den = ra + rb;
  if (den == 0.0) return a.w - b.w;
  const double num = (b.x - a.x) * (2.0 * p.x - a.x - b.x) + (b.y - a.y) * (2.0 * p.y - a.y - b.y);
  return num / den + (a.w - b.w);
}

enum class CurveKind : std::uint8_t { HyperbolaBranch, StraightLine, Empty };

class BisectorCurve {
 public:
  // Throws CoincidentSites when the two sites have the same position and weight.
  static BisectorCurve classify(const WeightedSite& a, const WeightedSite& b);

  CurveKind kind() const { return kind_; }
  const WeightedSite& site_lo() const { return lo_; }
  const WeightedSite& site_hi() const { return hi_; }
  double focal_offset() const { return hi_.w - lo_.w; }
  // Only meaningful for Empty curves: the id of the site closer everywhere.
  int dominant_site() const { return dominant_; }

  // StraightLine only: coefficients (a, b, c) of a*x + b*y = c.
  std::array<double, 3> line_coefficients() const;

  Point center() const { return center_; }
  Point axis() const { return axis_; }
  Point normal() const { return perp(axis_); }
  // Signed: positive when the branch bends around the higher-id site.
  double semi_major() const { return semi_a_; }
  double semi_minor() const { return semi_b_; }

  Point to_frame(Point p) const {
    const Point d = p - center_;
    return {dot(d, axis_), dot(d, perp(axis_))};
  }
  Point from_frame(Point uv) const { return center_ + uv.x * axis_ + uv.y * perp(axis_); }

  Point point_at(double t) const {
    return from_frame({semi_a_ * std::cosh(t), semi_b_ * std::sinh(t)});
  }
  Point tangent_at(double t) const {
    return semi_a_ * std::sinh(t) * axis_ + semi_b_ * std::cosh(t) * perp(axis_);
  }
  double param_of(Point p) const { return std::asinh(to_frame(p).y / semi_b_); }
  // Unit direction of travel as t -> +inf (dir > 0) or t -> -inf (dir < 0).
  Point asymptote(int dir) const;

  // d(lo, p) - d(hi, p); zero exactly on the bisector.
  double residual(Point p) const {
    return distance_difference(lo_, hi_, p);
  }
  bool contains(Point p, double tol = kTolerance) const {
    return std::abs(residual(p)) <= tol * (1.0 + std::abs(weighted_distance(lo_, p)));
  }

  bool same_pair(const BisectorCurve& o) const { return lo_.id == o.lo_.id && hi_.id == o.hi_.id; }

 private:
  WeightedSite lo_;
  WeightedSite hi_;
  CurveKind kind_ = CurveKind::Empty;
  int dominant_ = -1;
  Point center_;
  Point axis_{1.0, 0.0};
  double semi_a_ = 0.0;
  double semi_b_ = 0.0;
};

enum class Side : std::uint8_t { CloserA, Equidistant, CloserB };

Side side_of_bisector(Point p, const WeightedSite& a, const WeightedSite& b);

// A point found on a curve: the curve parameter and, for line queries, the
// parameter along the query line.
struct CurveHit {
  Point p;
  double t = 0.0;
  double s = 0.0;
};

struct CurveHits {
  std::vector<CurveHit> hits;
  // Two roots merged or nearly merged; the hits (if any) are unreliable as
  // crossings and callers tracing a contour treat them as a touch.
  bool tangent = false;
};

struct QuadraticRoots {
  int count = 0;
  std::array<double, 2> roots{};
  bool tangent = false;
};

// Roots of a*x^2 + b*x + c in ascending order. Near-double roots (relative
// discriminant below ~1e-12) are reported once with tangent = true.
QuadraticRoots solve_quadratic(double a, double b, double c);

// Curve against the infinite line origin + s * dir. Hits sorted by s.
CurveHits intersect_line(const BisectorCurve& c, Point origin, Point dir);

// Points equidistant to three sites (the weighted circumcenters). At most two.
CurveHits equidistant_points(const WeightedSite& s1, const WeightedSite& s2,
                             const WeightedSite& s3);

std::vector<Point> bisector_hline_intersections(const BisectorCurve& c, double y0);
std::vector<Point> bisector_pair_intersections(const BisectorCurve& c1, const BisectorCurve& c2);
std::vector<Point> bisector_segment_intersections(const BisectorCurve& c, Point a, Point b);

// Walks a bisector from a starting point in a chosen direction of its
// parameter. Events ahead of the cursor are those with larger (dir > 0) or
// smaller (dir < 0) parameter.
class BisectorCursor {
 public:
  BisectorCursor(BisectorCurve curve, Point from, int dir);

  const BisectorCurve& curve() const { return curve_; }
  double param() const { return t_; }
  int direction() const { return dir_; }
  Point position() const { return curve_.point_at(t_); }
  Point heading() const;

  bool is_ahead(double t) const { return (t - t_) * dir_ > 0.0; }
  // Index of the candidate parameter reached first, if any lies ahead.
  std::optional<std::size_t> first_after(std::span<const double> params) const;
  void advance_to(double t);

 private:
  BisectorCurve curve_;
  double t_ = 0.0;
  int dir_ = 1;
};

BisectorCursor walk_bisector(const BisectorCurve& c, Point from, int toward);

}  // namespace udg
