#include "udg/geom.hpp"

#include <algorithm>
#include <limits>

namespace udg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CoincidentSites: return "CoincidentSites";
    case ErrorCode::EmptyBisector: return "EmptyBisector";
    case ErrorCode::NearTangency: return "NearTangency";
    case ErrorCode::OffCurve: return "OffCurve";
    case ErrorCode::SiteAboveLine: return "SiteAboveLine";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::QueryBelowLine: return "QueryBelowLine";
    case ErrorCode::TraceStall: return "TraceStall";
    case ErrorCode::DegenerateTangency: return "DegenerateTangency";
    case ErrorCode::EmptyStructure: return "EmptyStructure";
    case ErrorCode::QueryBeforeAnyInsert: return "QueryBeforeAnyInsert";
    case ErrorCode::UnknownSource: return "UnknownSource";
    case ErrorCode::NotSeparated: return "NotSeparated";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

// Relative discriminant below which two roots count as one touching root.
constexpr double kTangentDisc = 1e-13;

Point unit(Point p) {
  const double n = norm(p);
  return n > 0.0 ? (1.0 / n) * p : Point{};
}

}  // namespace

BisectorCurve BisectorCurve::classify(const WeightedSite& a, const WeightedSite& b) {
  BisectorCurve c;
  c.lo_ = a.id < b.id ? a : b;
  c.hi_ = a.id < b.id ? b : a;
  const Point d = c.hi_.pos() - c.lo_.pos();
  const double dist = norm(d);
  const double delta = c.hi_.w - c.lo_.w;
  const double tol = kTolerance * (1.0 + std::max(dist, std::abs(delta)));
  if (dist <= tol && std::abs(delta) <= tol) {
    throw Error(ErrorCode::CoincidentSites,
                "sites " + std::to_string(a.id) + " and " + std::to_string(b.id));
  }
  c.center_ = 0.5 * (c.lo_.pos() + c.hi_.pos());
  c.axis_ = dist > 0.0 ? (1.0 / dist) * d : Point{1.0, 0.0};
  if (std::abs(delta) >= dist - tol) {
    c.kind_ = CurveKind::Empty;
    c.dominant_ = delta > 0.0 ? c.lo_.id : c.hi_.id;
    return c;
  }
  const double half = 0.5 * dist;
  // Nearly equal weights are reported as a line, but the parameterization keeps
  // the true weight gap so points stay on the bisector far from the sites.
  c.kind_ = std::abs(delta) < tol ? CurveKind::StraightLine : CurveKind::HyperbolaBranch;
  c.semi_a_ = 0.5 * delta;
  const double aa = std::abs(c.semi_a_);
  c.semi_b_ = std::sqrt((half - aa) * (half + aa));
  return c;
}

std::array<double, 3> BisectorCurve::line_coefficients() const {
  return {axis_.x, axis_.y, dot(axis_, center_)};
}

Point BisectorCurve::asymptote(int dir) const {
  const double v = dir > 0 ? semi_b_ : -semi_b_;
  return unit(semi_a_ * axis_ + v * perp(axis_));
}

Side side_of_bisector(Point p, const WeightedSite& a, const WeightedSite& b) {
  const double da = weighted_distance(a, p);
  const double diff = distance_difference(a, b, p);
  const double tol = kTolerance * (1.0 + std::abs(da));
  if (diff < -tol) return Side::CloserA;
  if (diff > tol) return Side::CloserB;
  return Side::Equidistant;
}

QuadraticRoots solve_quadratic(double a, double b, double c) {
  QuadraticRoots out;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0 || !std::isfinite(scale)) return out;
  a /= scale;
  b /= scale;
  c /= scale;
  if (a == 0.0) {
    if (b == 0.0) return out;
    out.count = 1;
    out.roots[0] = -c / b;
    return out;
  }
  const double disc = b * b - 4.0 * a * c;
  const double mag = b * b + std::abs(4.0 * a * c);
  out.tangent = std::abs(disc) <= kTangentDisc * mag;
  if (disc < 0.0) {
    if (!out.tangent) return out;
    out.count = 1;
    out.roots[0] = -b / (2.0 * a);
    return out;
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : -r1;
  if (r1 > r2) std::swap(r1, r2);
  out.count = 2;
  out.roots = {r1, r2};
  return out;
}

CurveHits intersect_line(const BisectorCurve& c, Point origin, Point dir) {
  CurveHits out;
  if (c.kind() == CurveKind::Empty) return out;
  const double dd = dot(dir, dir);
  if (dd == 0.0) return out;
  // Line: dot(p - origin, n) = 0. With p = center + u*axis + v*normal and
  // u = a cosh t, v = b sinh t, substitute z = e^t:
  //   (n1 a + n2 b) z^2 - 2 m z + (n1 a - n2 b) = 0.
  const Point n = perp(dir);
  const double n1 = dot(c.axis(), n);
  const double n2 = dot(c.normal(), n);
  const double m = dot(origin - c.center(), n);
  const double a = c.semi_major();
  const double b = c.semi_minor();
  const QuadraticRoots q = solve_quadratic(n1 * a + n2 * b, -2.0 * m, n1 * a - n2 * b);
  int valid = 0;
  for (int i = 0; i < q.count; ++i) {
    const double z = q.roots[i];
    if (!(z > 0.0) || !std::isfinite(z)) continue;
    ++valid;
    CurveHit h;
    h.t = std::log(z);
    h.p = c.point_at(h.t);
    h.s = dot(h.p - origin, dir) / dd;
    out.hits.push_back(h);
  }
  out.tangent = q.tangent && valid == q.count;
  std::sort(out.hits.begin(), out.hits.end(),
            [](const CurveHit& x, const CurveHit& y) { return x.s < y.s; });
  return out;
}

CurveHits equidistant_points(const WeightedSite& s1, const WeightedSite& s2,
                             const WeightedSite& s3) {
  // Solve on B(a, b) with a, b, c ordered by id. Along the branch the distance
  // to the focus a is c0 cosh t - a0 sgn(f), so |p - c|^2 = (r_a + w_a - w_c)^2
  // becomes alpha cosh t + beta sinh t + gamma = 0, a quadratic in e^t.
  std::array<WeightedSite, 3> s{s1, s2, s3};
  std::sort(s.begin(), s.end(), [](const WeightedSite& x, const WeightedSite& y) { return x.id < y.id; });
  CurveHits out;
  BisectorCurve c;
  try {
    c = BisectorCurve::classify(s[0], s[1]);
  } catch (const Error&) {
    return out;
  }
  if (c.kind() == CurveKind::Empty) return out;
  const WeightedSite& a = c.site_lo();
  const WeightedSite& o = s[2];
  const double half = 0.5 * distance(a.pos(), c.site_hi().pos());
  const double f = dot(a.pos() - c.center(), c.axis());
  const double sa = c.semi_major() * (f >= 0.0 ? 1.0 : -1.0);
  const Point e = a.pos() - o.pos();
  const Point m = c.center() - a.pos();
  const double dd = dot(e, e);
  const double delta = a.w - o.w;
  const double alpha = 2.0 * c.semi_major() * dot(c.axis(), e) - 2.0 * delta * half;
  const double beta = 2.0 * c.semi_minor() * dot(c.normal(), e);
  const double gamma = 2.0 * dot(m, e) + (dd - delta * delta) + 2.0 * delta * sa;
  const QuadraticRoots q = solve_quadratic(alpha + beta, 2.0 * gamma, alpha - beta);
  int valid = 0;
  for (int i = 0; i < q.count; ++i) {
    const double z = q.roots[i];
    if (!(z > 0.0) || !std::isfinite(z)) continue;
    const double t = std::log(z);
    const double ra = half * std::cosh(t) - sa;
    // Squaring admits points where |p - o| = -(r_a + delta).
    if (ra + delta < -kTolerance * (1.0 + ra)) continue;
    ++valid;
    out.hits.push_back({c.point_at(t), 0.0, 0.0});
  }
  out.tangent = q.tangent && valid == q.count;
  return out;
}

std::vector<Point> bisector_hline_intersections(const BisectorCurve& c, double y0) {
  if (c.kind() == CurveKind::Empty) {
    throw Error(ErrorCode::EmptyBisector, "horizontal-line query on an empty bisector");
  }
  const CurveHits h = intersect_line(c, {0.0, y0}, {1.0, 0.0});
  std::vector<Point> out;
  if (h.tangent && h.hits.size() == 2) {
    out.push_back(0.5 * (h.hits[0].p + h.hits[1].p));
  } else {
    for (const auto& hit : h.hits) out.push_back(hit.p);
  }
  for (auto& p : out) p.y = y0;
  return out;
}

std::vector<Point> bisector_segment_intersections(const BisectorCurve& c, Point a, Point b) {
  if (c.kind() == CurveKind::Empty) {
    throw Error(ErrorCode::EmptyBisector, "segment query on an empty bisector");
  }
  const CurveHits h = intersect_line(c, a, b - a);
  std::vector<Point> out;
  for (const auto& hit : h.hits) {
    if (hit.s < -1e-12 || hit.s > 1.0 + 1e-12) continue;
    out.push_back(hit.p);
  }
  if (h.tangent && !out.empty()) {
    throw Error(ErrorCode::NearTangency, "bisector touches segment");
  }
  return out;
}

namespace {

// Shared site between two bisectors, or -1.
int shared_site(const BisectorCurve& c1, const BisectorCurve& c2) {
  for (int x : {c1.site_lo().id, c1.site_hi().id}) {
    if (x == c2.site_lo().id || x == c2.site_hi().id) return x;
  }
  return -1;
}

std::vector<Point> dedupe(std::vector<Point> pts) {
  std::vector<Point> out;
  for (const Point& p : pts) {
    bool dup = false;
    for (const Point& q : out) dup = dup || distance(p, q) <= 1e-9 * (1.0 + norm(p));
    if (!dup) out.push_back(p);
  }
  return out;
}

}  // namespace

std::vector<Point> bisector_pair_intersections(const BisectorCurve& c1, const BisectorCurve& c2) {
  if (c1.kind() == CurveKind::Empty || c2.kind() == CurveKind::Empty) {
    throw Error(ErrorCode::EmptyBisector, "pair query on an empty bisector");
  }
  if (c1.same_pair(c2)) throw std::invalid_argument("bisector_pair_intersections: identical curves");
  const int shared = shared_site(c1, c2);
  if (shared >= 0) {
    const WeightedSite& s = c1.site_lo().id == shared ? c1.site_lo() : c1.site_hi();
    const WeightedSite& a = c1.site_lo().id == shared ? c1.site_hi() : c1.site_lo();
    const WeightedSite& b = c2.site_lo().id == shared ? c2.site_hi() : c2.site_lo();
    const CurveHits h = equidistant_points(s, a, b);
    if (h.tangent) throw Error(ErrorCode::NearTangency, "bisectors touch");
    std::vector<Point> out;
    for (const auto& hit : h.hits) out.push_back(hit.p);
    return dedupe(std::move(out));
  }
  // Four distinct sites: scan c1 for sign changes of c2's residual, then bisect.
  double scale = 1.0;
  for (const auto* s : {&c1.site_lo(), &c1.site_hi(), &c2.site_lo(), &c2.site_hi()}) {
    scale = std::max({scale, std::abs(s->x), std::abs(s->y), std::abs(s->w)});
  }
  const double reach = 1e4 * scale;
  const double tmax = std::asinh(reach / c1.semi_minor());
  constexpr int kSamples = 20000;
  auto g = [&](double t) { return c2.residual(c1.point_at(t)); };
  std::vector<Point> out;
  double prev_t = -tmax;
  double prev_g = g(prev_t);
  double prev_prev_g = prev_g;
  for (int i = 1; i <= kSamples; ++i) {
    const double t = -tmax + 2.0 * tmax * i / kSamples;
    const double gt = g(t);
    if ((prev_g < 0.0) != (gt < 0.0)) {
      double lo = prev_t;
      double hi = t;
      double glo = prev_g;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      out.push_back(c1.point_at(0.5 * (lo + hi)));
    } else if (i >= 2 && std::abs(prev_g) < std::abs(prev_prev_g) &&
               std::abs(prev_g) < std::abs(gt) &&
               std::abs(prev_g) < 1e-9 * (1.0 + norm(c1.point_at(prev_t)))) {
      throw Error(ErrorCode::NearTangency, "bisectors nearly touch");
    }
    prev_prev_g = prev_g;
    prev_t = t;
    prev_g = gt;
  }
  return dedupe(std::move(out));
}

BisectorCursor::BisectorCursor(BisectorCurve curve, Point from, int dir)
    : curve_(std::move(curve)), dir_(dir >= 0 ? 1 : -1) {
  if (curve_.kind() == CurveKind::Empty || !curve_.contains(from, 1e-7)) {
    throw Error(ErrorCode::OffCurve, "cursor start is not on the bisector");
  }
  t_ = curve_.param_of(from);
}

Point BisectorCursor::heading() const {
  return unit(static_cast<double>(dir_) * curve_.tangent_at(t_));
}

std::optional<std::size_t> BisectorCursor::first_after(std::span<const double> params) const {
  std::optional<std::size_t> best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double gap = (params[i] - t_) * dir_;
    if (gap > 0.0 && gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return best;
}

void BisectorCursor::advance_to(double t) { t_ = t; }

BisectorCursor walk_bisector(const BisectorCurve& c, Point from, int toward) {
  return BisectorCursor(c, from, toward);
}

}  // namespace udg
