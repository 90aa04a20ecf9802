#include "udg/locator.hpp"

#include <algorithm>
#include <cmath>

#include "udg/counters.hpp"

namespace udg {

namespace {

double param_at_vertex(const BisectorCurve& c, const VdVertex& v) {
  if (v.kind != VertexKind::AtInfinity) return c.param_of(v.p);
  return dot(v.p, c.asymptote(1)) >= dot(v.p, c.asymptote(-1)) ? kInf : -kInf;
}

double x_at(const BisectorCurve& c, double t) {
  if (std::isinf(t)) {
    const Point u = c.asymptote(t > 0 ? 1 : -1);
    if (u.x == 0.0) return c.point_at(t > 0 ? 700.0 : -700.0).x;
    return u.x > 0 ? kInf : -kInf;
  }
  return c.point_at(t).x;
}

double sample_x(double lo, double hi) {
  const bool flo = std::isfinite(lo);
  const bool fhi = std::isfinite(hi);
  if (flo && fhi) return 0.5 * (lo + hi);
  if (fhi) return hi - (1.0 + std::abs(hi));
  if (flo) return lo + (1.0 + std::abs(lo));
  return 0.0;
}

}  // namespace

Locator::Locator(const HalfPlaneVD& vd) : vd_(&vd) {
  for (const auto& f : vd.faces) {
    for (std::size_t pi = 0; pi < f.pieces.size(); ++pi) {
      const int nb = f.pieces[pi].neighbor;
      if (nb < 0 || nb < f.site) continue;
      const BisectorCurve c = BisectorCurve::classify(vd.sites[f.site], vd.sites[nb]);
      double ta = param_at_vertex(c, vd.vertices[f.verts[pi]]);
      double tb = param_at_vertex(c, vd.vertices[f.verts[pi + 1]]);
      if (ta > tb) std::swap(ta, tb);
      // Split where the curve turns vertical: dx/dt = A sinh t + B cosh t.
      const double A = c.semi_major() * c.axis().x;
      const double B = c.semi_minor() * c.normal().x;
      std::vector<double> cuts{ta};
      if (A == 0.0 && B == 0.0) continue;  // vertical line
      if (std::abs(B) < std::abs(A)) {
        const double tz = std::atanh(-B / A);
        if (tz > ta && tz < tb) cuts.push_back(tz);
      }
      cuts.push_back(tb);
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        Piece p{c, cuts[k], cuts[k + 1], x_at(c, cuts[k]), x_at(c, cuts[k + 1]), f.site, nb};
        if (p.x0 > p.x1) std::swap(p.x0, p.x1);
        if (!(p.x0 < p.x1)) continue;
        pieces_.push_back(p);
      }
    }
  }
  for (const auto& p : pieces_) {
    if (std::isfinite(p.x0)) xs_.push_back(p.x0);
    if (std::isfinite(p.x1)) xs_.push_back(p.x1);
  }
  std::sort(xs_.begin(), xs_.end());
  xs_.erase(std::unique(xs_.begin(), xs_.end()), xs_.end());
  leaves_ = xs_.size() + 1;
  std::size_t cap = 1;
  while (cap < leaves_) {
    cap *= 2;
    ++depth_;
  }
  node_pieces_.assign(2 * cap, {});
  for (int i = 0; i < static_cast<int>(pieces_.size()); ++i) insert(1, 0, leaves_ - 1, i);
  sort_node(1, 0, leaves_ - 1);
}

void Locator::insert(int node, std::size_t lo, std::size_t hi, int piece) {
  const Piece& p = pieces_[piece];
  // Slab k spans (xs[k-1], xs[k]).
  const double slo = lo == 0 ? -kInf : xs_[lo - 1];
  const double shi = hi + 1 == leaves_ ? kInf : xs_[hi];
  if (p.x1 <= slo || p.x0 >= shi) return;
  if (p.x0 <= slo && p.x1 >= shi) {
    node_pieces_[node].push_back(piece);
    return;
  }
  const std::size_t mid = (lo + hi) / 2;
  insert(2 * node, lo, mid, piece);
  insert(2 * node + 1, mid + 1, hi, piece);
}

void Locator::sort_node(int node, std::size_t lo, std::size_t hi) {
  auto& list = node_pieces_[node];
  if (!list.empty()) {
    const double slo = lo == 0 ? -kInf : xs_[lo - 1];
    const double shi = hi + 1 == leaves_ ? kInf : xs_[hi];
    const double x = sample_x(slo, shi);
    std::vector<std::pair<double, int>> keyed;
    keyed.reserve(list.size());
    for (int i : list) keyed.emplace_back(y_at(pieces_[i], x), i);
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t k = 0; k < list.size(); ++k) list[k] = keyed[k].second;
  }
  if (lo == hi) return;
  const std::size_t mid = (lo + hi) / 2;
  sort_node(2 * node, lo, mid);
  sort_node(2 * node + 1, mid + 1, hi);
}

double Locator::y_at(const Piece& p, double x) const {
  const BisectorCurve& c = p.curve;
  // x(t) = cx + A cosh t + B sinh t; with z = e^t this is a quadratic.
  const double A = c.semi_major() * c.axis().x;
  const double B = c.semi_minor() * c.normal().x;
  const QuadraticRoots q = solve_quadratic(A + B, -2.0 * (x - c.center().x), A - B);
  double best_t = std::isfinite(p.t0) ? p.t0 : p.t1;
  double best_err = kInf;
  for (int i = 0; i < q.count; ++i) {
    if (!(q.roots[i] > 0.0)) continue;
    const double t = std::log(q.roots[i]);
    const double err = t < p.t0 ? p.t0 - t : (t > p.t1 ? t - p.t1 : 0.0);
    if (err < best_err) {
      best_err = err;
      best_t = std::clamp(t, p.t0, p.t1);
    }
  }
  return c.point_at(best_t).y;
}

Nearest Locator::locate(Point q) const {
  if (q.y < 0.0) throw Error(ErrorCode::QueryBelowLine, "query below the axis");
  if (vd_->empty()) throw Error(ErrorCode::EmptyStructure, "empty diagram");
  counters().locates++;
  const auto& sites = vd_->sites;
  auto better = [&](int a, int b) {
    const double diff = distance_difference(sites[a], sites[b], q);
    return diff < 0.0 || (diff == 0.0 && sites[a].id < sites[b].id) ? a : b;
  };

  const std::size_t slab =
      static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), q.x) - xs_.begin());
  int node = 1;
  std::size_t lo = 0;
  std::size_t hi = leaves_ - 1;
  int below = -1;
  double below_y = -kInf;
  for (;;) {
    const auto& list = node_pieces_[node];
    // Last piece whose height at q.x is not above q.
    std::size_t a = 0;
    std::size_t b = list.size();
    while (a < b) {
      const std::size_t m = (a + b) / 2;
      if (y_at(pieces_[list[m]], q.x) <= q.y) {
        a = m + 1;
      } else {
        b = m;
      }
    }
    if (a > 0) {
      const double y = y_at(pieces_[list[a - 1]], q.x);
      if (y > below_y) {
        below_y = y;
        below = list[a - 1];
      }
    }
    if (lo == hi) break;
    const std::size_t mid = (lo + hi) / 2;
    if (slab <= mid) {
      node = 2 * node;
      hi = mid;
    } else {
      node = 2 * node + 1;
      lo = mid + 1;
    }
  }

  int owner;
  if (below >= 0) {
    owner = better(pieces_[below].s0, pieces_[below].s1);
  } else {
    const int fi = vd_->face_on_line(q.x);
    owner = vd_->faces[fi].site;
    if (fi > 0 && q.x == vd_->faces[fi].lx0) owner = better(owner, vd_->faces[fi - 1].site);
  }
  return {sites[owner].id, weighted_distance(sites[owner], q)};
}

Locator build_locator(const SpokedVD& vd) { return Locator(vd.base()); }

int flat_locate(const HalfPlaneVD& vd, Point q) {
  if (q.y < 0.0) return -1;
  for (int fi = 0; fi < static_cast<int>(vd.faces.size()); ++fi) {
    const VdFace& f = vd.faces[fi];
    const WeightedSite& s = vd.sites[f.site];
    const double th = std::atan2(q.y - s.y, q.x - s.x);
    auto angle = [&](int i) {
      const VdVertex& v = vd.vertices[f.verts[i]];
      return v.kind == VertexKind::AtInfinity ? std::atan2(v.p.y, v.p.x)
                                               : std::atan2(v.p.y - s.y, v.p.x - s.x);
    };
    if (th < angle(0) || th > angle(static_cast<int>(f.verts.size()) - 1)) continue;
    int sector = 0;
    while (sector + 1 < static_cast<int>(f.pieces.size()) && angle(sector + 1) < th) ++sector;
    const int nb = f.pieces[sector].neighbor;
    if (nb < 0 || distance_difference(s, vd.sites[nb], q) <= 0.0) return fi;
  }
  return -1;
}

}  // namespace udg
