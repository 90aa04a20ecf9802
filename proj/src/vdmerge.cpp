#include "udg/vdmerge.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>

#include "udg/counters.hpp"

namespace udg {

MergeStats& MergeStats::operator+=(const MergeStats& o) {
  seeds += o.seeds;
  components += o.components;
  trace_steps += o.trace_steps;
  arc_crossings += o.arc_crossings;
  spoke_crossings += o.spoke_crossings;
  max_spoke_crossings = std::max(max_spoke_crossings, o.max_spoke_crossings);
  return *this;
}

const char* to_string(TraceEvent::Kind k) {
  switch (k) {
    case TraceEvent::Start: return "start";
    case TraceEvent::CrossArcA: return "arc-a";
    case TraceEvent::CrossArcB: return "arc-b";
    case TraceEvent::CrossSpokeA: return "spoke-a";
    case TraceEvent::CrossSpokeB: return "spoke-b";
    case TraceEvent::HitLine: return "line";
    case TraceEvent::ToInfinity: return "infinity";
  }
  return "?";
}

std::size_t SeedRegistry::remaining() const {
  return static_cast<std::size_t>(std::count(consumed_.begin(), consumed_.end(), false));
}

namespace {

// Bisector of a cross pair, or the id of the site that wins everywhere.
struct PairCurve {
  std::optional<BisectorCurve> curve;
  int dominant = -1;
};

PairCurve pair_curve(const WeightedSite& a, const WeightedSite& b) {
  try {
    BisectorCurve c = BisectorCurve::classify(a, b);
    if (c.kind() == CurveKind::Empty) return {std::nullopt, c.dominant_site()};
    return {c, -1};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CoincidentSites) throw;
    return {std::nullopt, std::min(a.id, b.id)};
  }
}

double representative(double lo, double hi) {
  const bool flo = std::isfinite(lo);
  const bool fhi = std::isfinite(hi);
  if (flo && fhi) return 0.5 * (lo + hi);
  if (fhi) return hi - (1.0 + std::abs(hi));
  if (flo) return lo + (1.0 + std::abs(lo));
  return 0.0;
}

enum Which : int { kA = 0, kB = 1 };

struct Interval {
  double x0 = -kInf;
  double x1 = kInf;
  Which side = kA;
  int face = -1;
  int seed_right = -1;  // seed at x1, or -1 when x1 is a vertex of the winner
};

struct Sweep {
  std::vector<Interval> intervals;
  std::vector<ContourSeed> seeds;
};

Sweep sweep_line(const HalfPlaneVD& va, const HalfPlaneVD& vb) {
  struct Sub {
    double x0, x1;
    Which side;
    int face;
    bool root_left;  // x0 is a bisector root inside the current overlap
    int fa, fb;
  };
  std::vector<Sub> subs;
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<double> cuts;
  while (i < va.faces.size() && j < vb.faces.size()) {
    const VdFace& fa = va.faces[i];
    const VdFace& fb = vb.faces[j];
    const double lo = std::max(fa.lx0, fb.lx0);
    const double hi = std::min(fa.lx1, fb.lx1);
    if (lo < hi) {
      const WeightedSite& sa = va.sites[fa.site];
      const WeightedSite& sb = vb.sites[fb.site];
      const PairCurve pc = pair_curve(sa, sb);
      cuts.assign({lo});
      if (pc.curve) {
        const CurveHits h = intersect_line(*pc.curve, {0.0, 0.0}, {1.0, 0.0});
        if (!h.tangent) {
          for (const auto& hit : h.hits) {
            const double x = hit.p.x;
            const double tol = kTolerance * (1.0 + std::abs(x));
            if (x <= lo - tol || x >= hi + tol) continue;
            if (std::abs(x - lo) <= tol || std::abs(x - hi) <= tol) {
              throw Error(ErrorCode::DegenerateTangency, "contour root on an l-edge endpoint");
            }
            cuts.push_back(x);
          }
        }
      }
      cuts.push_back(hi);
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        Which w;
        if (!pc.curve) {
          w = pc.dominant == sa.id ? kA : kB;
        } else {
          const Point q{representative(cuts[k], cuts[k + 1]), 0.0};
          const double diff = distance_difference(sa, sb, q);
          w = (diff < 0.0 || (diff == 0.0 && sa.id < sb.id)) ? kA : kB;
        }
        subs.push_back({cuts[k], cuts[k + 1], w, w == kA ? static_cast<int>(i) : static_cast<int>(j),
                        k > 0, static_cast<int>(i), static_cast<int>(j)});
      }
    }
    if (fa.lx1 < fb.lx1) {
      ++i;
    } else if (fb.lx1 < fa.lx1) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }

  Sweep out;
  for (const Sub& s : subs) {
    if (!out.intervals.empty()) {
      Interval& last = out.intervals.back();
      if (last.side == s.side && last.face == s.face) {
        last.x1 = s.x1;
        continue;
      }
      if (last.side != s.side) {
        if (!s.root_left) {
          throw Error(ErrorCode::DegenerateTangency, "winner changes at an l-edge endpoint");
        }
        ContourSeed seed;
        seed.point = {s.x0, 0.0};
        seed.face_a = s.fa;
        seed.face_b = s.fb;
        seed.site_a = va.faces[s.fa].site;
        seed.site_b = vb.faces[s.fb].site;
        seed.a_left = last.side == kA;
        last.seed_right = static_cast<int>(out.seeds.size());
        out.seeds.push_back(seed);
      }
    }
    out.intervals.push_back({s.x0, s.x1, s.side, s.face, -1});
  }
  return out;
}

}  // namespace

std::vector<ContourSeed> ell_intersections(const HalfPlaneVD& va, const HalfPlaneVD& vb) {
  if (va.empty() || vb.empty()) return {};
  return sweep_line(va, vb).seeds;
}


namespace {

enum class Feat : std::uint8_t { None, Line, ArcA, ArcB, SpokeA, SpokeB };

struct FeatureId {
  Feat kind = Feat::None;
  int face = -1;
  int index = -1;
  bool operator==(const FeatureId&) const = default;
};

struct Candidate {
  double gap = kInf;
  double t = 0.0;
  Point p;
  FeatureId f;
};

// Spoke crossing counts, keyed by (diagram, face, vertex index).
using SpokeTally = std::map<std::tuple<int, int, int>, std::size_t>;

[[noreturn]] void stall(const std::string& why) { throw Error(ErrorCode::TraceStall, why); }

class Tracer {
 public:
  Tracer(const SpokedVD& sa, const SpokedVD& sb, SeedRegistry& reg, const MergeOptions& opts,
         SpokeTally& tally, MergeStats& stats, std::size_t step_limit)
      : vd_{&sa, &sb}, reg_(reg), opts_(opts), tally_(tally), stats_(stats), step_limit_(step_limit) {}

  ContourComponent run(std::size_t start);

 private:
  struct Cursor {
    int face = -1;
    int piece = -1;
    int site = -1;  // index into the diagram's sites
  };

  const HalfPlaneVD& base(int d) const { return vd_[d]->base(); }
  const WeightedSite& site(int d) const { return base(d).sites[cur_[d].site]; }
  const VdFace& face(int d) const { return base(d).faces[cur_[d].face]; }

  bool in_sector(int d, Point q) const;
  void consider(FeatureId f, std::vector<std::pair<Point, double>> roots);
  void gather_arc(int d);
  void gather_spokes(int d);
  void gather_line();
  void set_curve(const WeightedSite& a, const WeightedSite& b);
  int direction_into(const WeightedSite& lost, const WeightedSite& gained) const;
  void log(TraceEvent::Kind k);

  const SpokedVD* vd_[2];
  SeedRegistry& reg_;
  const MergeOptions& opts_;
  SpokeTally& tally_;
  MergeStats& stats_;
  std::size_t step_limit_;
  std::size_t steps_ = 0;

  Cursor cur_[2];
  std::optional<BisectorCurve> curve_;
  Point p_;
  double t_ = 0.0;
  int dir_ = 1;
  FeatureId last_;
  std::vector<Candidate> cands_;
};

bool Tracer::in_sector(int d, Point q) const {
  const WeightedSite& s = site(d);
  const double th = std::atan2(q.y - s.y, q.x - s.x);
  const double lo = vd_[d]->angle(cur_[d].face, cur_[d].piece);
  const double hi = vd_[d]->angle(cur_[d].face, cur_[d].piece + 1);
  constexpr double tol = 1e-12;
  return th >= lo - tol && th <= hi + tol;
}

void Tracer::consider(FeatureId f, std::vector<std::pair<Point, double>> roots) {
  if (f == last_ && !roots.empty()) {
    // The feature just crossed reappears at the current position; drop it.
    std::size_t near = 0;
    for (std::size_t i = 1; i < roots.size(); ++i) {
      if (std::abs(roots[i].second - t_) < std::abs(roots[near].second - t_)) near = i;
    }
    if (std::abs(roots[near].second - t_) <= 1e-7 * (1.0 + std::abs(t_))) {
      roots.erase(roots.begin() + static_cast<std::ptrdiff_t>(near));
    }
  }
  for (const auto& [q, t] : roots) {
    const double gap = (t - t_) * dir_;
    if (!(gap > 0.0)) continue;
    cands_.push_back({gap, t, q, f});
  }
}

void Tracer::gather_arc(int d) {
  const BoundaryPiece& bp = face(d).pieces[cur_[d].piece];
  if (bp.neighbor < 0) return;
  const WeightedSite& n = base(d).sites[bp.neighbor];
  const CurveHits h = equidistant_points(site(0), site(1), n);
  std::vector<std::pair<Point, double>> roots;
  for (const auto& hit : h.hits) {
    const Point q = hit.p;
    if (q.y < -kTolerance * (1.0 + norm(q))) continue;
    if (!in_sector(d, q)) continue;
    roots.emplace_back(q, curve_->param_of(q));
  }
  consider({d == 0 ? Feat::ArcA : Feat::ArcB, cur_[d].face, cur_[d].piece}, std::move(roots));
}

void Tracer::gather_spokes(int d) {
  const HalfPlaneVD& vd = base(d);
  const VdFace& f = face(d);
  const WeightedSite& s = site(d);
  for (int idx : {cur_[d].piece, cur_[d].piece + 1}) {
    const VdVertex& v = vd.vertices[f.verts[idx]];
    const bool inf = v.kind == VertexKind::AtInfinity;
    if (v.kind == VertexKind::OnLine || (inf && v.p.y <= 0.0)) continue;
    const Point dir = inf ? v.p : v.p - s.pos();
    const CurveHits h = intersect_line(*curve_, s.pos(), dir);
    if (h.tangent) continue;
    std::vector<std::pair<Point, double>> roots;
    for (const auto& hit : h.hits) {
      if (hit.s <= 0.0) continue;
      if (!inf && hit.s > 1.0 + 1e-9) continue;
      if (hit.p.y < -kTolerance * (1.0 + norm(hit.p))) continue;
      roots.emplace_back(hit.p, hit.t);
    }
    consider({d == 0 ? Feat::SpokeA : Feat::SpokeB, cur_[d].face, idx}, std::move(roots));
  }
}

void Tracer::gather_line() {
  const CurveHits h = intersect_line(*curve_, {0.0, 0.0}, {1.0, 0.0});
  if (h.tangent) return;
  std::vector<std::pair<Point, double>> roots;
  for (const auto& hit : h.hits) roots.emplace_back(Point{hit.p.x, 0.0}, hit.t);
  consider({Feat::Line, -1, -1}, std::move(roots));
}

void Tracer::set_curve(const WeightedSite& a, const WeightedSite& b) {
  const PairCurve pc = pair_curve(a, b);
  if (!pc.curve) stall("contour continues along an empty bisector");
  curve_ = pc.curve;
}

// Direction along the current curve that enters the region of `gained`
// (taken from `lost` at the current point). Gradients of the two distances are
// nearly parallel far from the sites, so compare distances at parameter
// offsets instead, staying short of the other common point of the three
// bisectors.
int Tracer::direction_into(const WeightedSite& lost, const WeightedSite& gained) const {
  double delta = 1.0;
  const WeightedSite& other = lost.id == site(0).id || gained.id == site(0).id ? site(1) : site(0);
  for (const auto& hit : equidistant_points(lost, gained, other).hits) {
    const double gap = std::abs(curve_->param_of(hit.p) - t_);
    if (gap > 1e-9 * (1.0 + std::abs(t_))) delta = std::min(delta, 0.5 * gap);
  }
  auto margin = [&](double t) {
    const Point q = curve_->point_at(t);
    return distance_difference(lost, gained, q);
  };
  return margin(t_ + delta) >= margin(t_ - delta) ? 1 : -1;
}

void Tracer::log(TraceEvent::Kind k) {
  if (opts_.trace_log) opts_.trace_log->push_back({k, site(0).id, site(1).id, p_});
}

ContourComponent Tracer::run(std::size_t start) {
  const ContourSeed& seed = reg_.seeds()[start];
  reg_.consume(start);
  ContourComponent out;
  out.a_left = seed.a_left;
  out.nodes.push_back({NodeKind::Seed, seed.point, static_cast<int>(start)});

  cur_[0] = {seed.face_a, 0, seed.site_a};
  cur_[1] = {seed.face_b, 0, seed.site_b};
  for (int d = 0; d < 2; ++d) {
    const WeightedSite& s = site(d);
    cur_[d].piece = vd_[d]->sector_of(cur_[d].face, std::atan2(-s.y, seed.point.x - s.x));
  }
  set_curve(site(0), site(1));
  p_ = seed.point;
  t_ = curve_->param_of(p_);
  dir_ = curve_->tangent_at(t_).y > 0.0 ? 1 : -1;
  last_ = {Feat::Line, -1, -1};
  log(TraceEvent::Start);

  for (;;) {
    ++stats_.trace_steps;
    if (++steps_ > step_limit_) stall("step limit exceeded");
    counters().trace_steps++;
    cands_.clear();
    gather_arc(0);
    gather_arc(1);
    gather_spokes(0);
    gather_spokes(1);
    gather_line();

    const auto best = std::min_element(cands_.begin(), cands_.end(),
                                       [](const Candidate& x, const Candidate& y) { return x.gap < y.gap; });
    if (best == cands_.end()) {
      const Point u = curve_->asymptote(dir_);
      for (int d = 0; d < 2; ++d) {
        if (face(d).pieces[cur_[d].piece].neighbor >= 0) stall("contour leaves through an arc");
        const double th = std::atan2(u.y, u.x);
        const double lo = vd_[d]->angle(cur_[d].face, cur_[d].piece);
        const double hi = vd_[d]->angle(cur_[d].face, cur_[d].piece + 1);
        if (th < lo - 1e-9 || th > hi + 1e-9) stall("asymptote outside the current sector");
      }
      if (!(u.y > 0.0)) stall("contour escapes below the axis");
      ContourNode n{NodeKind::Infinity, u};
      n.face_from = cur_[0].face;
      n.piece_from = cur_[0].piece;
      n.face_to = cur_[1].face;
      n.piece_to = cur_[1].piece;
      out.nodes.push_back(n);
      out.sites_a.push_back(cur_[0].site);
      out.sites_b.push_back(cur_[1].site);
      p_ = u;
      log(TraceEvent::ToInfinity);
      return out;
    }

    const Candidate c = *best;
    p_ = c.p;
    t_ = c.t;
    switch (c.f.kind) {
      case Feat::Line: {
        int match = -1;
        double gap = kInf;
        const double reach = 1e-6 * (1.0 + std::abs(p_.x));
        const auto& seeds = reg_.seeds();
        const auto mid = std::lower_bound(seeds.begin(), seeds.end(), p_.x,
                                          [](const ContourSeed& s, double x) { return s.point.x < x; });
        auto try_seed = [&](std::size_t i) {
          const ContourSeed& s = seeds[i];
          if (reg_.consumed(i) || s.face_a != cur_[0].face || s.face_b != cur_[1].face) return;
          const double g = std::abs(s.point.x - p_.x);
          if (g < gap) {
            gap = g;
            match = static_cast<int>(i);
          }
        };
        const auto at = static_cast<std::size_t>(mid - seeds.begin());
        for (std::size_t i = at; i < seeds.size() && seeds[i].point.x - p_.x <= reach; ++i) try_seed(i);
        for (std::size_t i = at; i > 0 && p_.x - seeds[i - 1].point.x <= reach; --i) try_seed(i - 1);
        if (match < 0 || gap > reach) stall("contour reaches the axis away from any seed");
        reg_.consume(static_cast<std::size_t>(match));
        out.nodes.push_back({NodeKind::Seed, reg_.seeds()[match].point, match});
        out.sites_a.push_back(cur_[0].site);
        out.sites_b.push_back(cur_[1].site);
        log(TraceEvent::HitLine);
        return out;
      }
      case Feat::ArcA:
      case Feat::ArcB: {
        const int d = c.f.kind == Feat::ArcA ? 0 : 1;
        const BoundaryPiece bp = face(d).pieces[cur_[d].piece];
        ContourNode n{d == 0 ? NodeKind::ArcA : NodeKind::ArcB, p_};
        n.face_from = cur_[d].face;
        n.piece_from = cur_[d].piece;
        n.face_to = bp.twin_face;
        n.piece_to = bp.twin_piece;
        out.nodes.push_back(n);
        out.sites_a.push_back(cur_[0].site);
        out.sites_b.push_back(cur_[1].site);
        const WeightedSite old_site = site(d);
        cur_[d] = {bp.twin_face, bp.twin_piece, bp.neighbor};
        set_curve(site(0), site(1));
        t_ = curve_->param_of(p_);
        dir_ = direction_into(old_site, site(d));
        last_ = {c.f.kind, bp.twin_face, bp.twin_piece};
        ++stats_.arc_crossings;
        counters().arc_crossings++;
        log(d == 0 ? TraceEvent::CrossArcA : TraceEvent::CrossArcB);
        break;
      }
      case Feat::SpokeA:
      case Feat::SpokeB: {
        const int d = c.f.kind == Feat::SpokeA ? 0 : 1;
        const int pieces = static_cast<int>(face(d).pieces.size());
        const int next = c.f.index == cur_[d].piece ? cur_[d].piece - 1 : cur_[d].piece + 1;
        if (next < 0 || next >= pieces) stall("spoke crossing leaves the face");
        cur_[d].piece = next;
        last_ = c.f;
        const std::size_t count = ++tally_[{d, c.f.face, c.f.index}];
        stats_.max_spoke_crossings = std::max(stats_.max_spoke_crossings, count);
        ++stats_.spoke_crossings;
        counters().spoke_crossings++;
        log(d == 0 ? TraceEvent::CrossSpokeA : TraceEvent::CrossSpokeB);
        break;
      }
      case Feat::None:
        stall("no feature");
    }
  }
}

std::size_t step_limit_for(const HalfPlaneVD& va, const HalfPlaneVD& vb) {
  std::size_t n = 64;
  for (const auto* vd : {&va, &vb}) {
    for (const auto& f : vd->faces) n += 4 * f.verts.size();
  }
  return n;
}

}  // namespace

ContourComponent trace_component(const SpokedVD& sa, const SpokedVD& sb, std::size_t start,
                                 SeedRegistry& registry, const MergeOptions& opts) {
  SpokeTally tally;
  MergeStats local;
  MergeStats& stats = opts.stats ? *opts.stats : local;
  Tracer tr(sa, sb, registry, opts, tally, stats, step_limit_for(sa.base(), sb.base()));
  return tr.run(start);
}

namespace {

struct HitRef {
  double angle = 0.0;
  int path = -1;
  int node = -1;
  int slot = 0;
};

class Stitcher {
 public:
  Stitcher(const HalfPlaneVD& va, const HalfPlaneVD& vb, const Sweep& sweep,
           const std::vector<ContourComponent>& paths, const std::vector<std::pair<int, int>>& seed_nodes)
      : in_{&va, &vb}, sweep_(sweep), paths_(paths), seed_nodes_(seed_nodes) {}

  HalfPlaneVD run();

 private:
  void register_hits();
  void add_hit(int d, int face, int piece, Point p, bool at_inf, int path, int node, int slot);
  int map_input_vertex(int d, int v);
  int seed_vertex(int seed);
  int node_vertex(int path, int node);
  int out_site(int d, int s) const { return d == 0 ? s : s + offset_; }
  void build_face(const Interval& iv);
  void link_twins();

  const HalfPlaneVD* in_[2];
  const Sweep& sweep_;
  const std::vector<ContourComponent>& paths_;
  const std::vector<std::pair<int, int>>& seed_nodes_;  // seed -> (path, node)
  int offset_ = 0;

  HalfPlaneVD out_;
  std::vector<std::vector<std::vector<HitRef>>> hits_[2];  // [d][face][piece]
  std::vector<std::vector<std::array<int, 2>>> pos_;       // [path][node][slot]
  std::vector<int> vmap_[2];
  std::vector<int> seed_v_;
  std::vector<std::vector<int>> node_v_;
};

void Stitcher::add_hit(int d, int face, int piece, Point p, bool at_inf, int path, int node, int slot) {
  const WeightedSite& s = in_[d]->sites[in_[d]->faces[face].site];
  const double a = at_inf ? std::atan2(p.y, p.x) : std::atan2(p.y - s.y, p.x - s.x);
  hits_[d][face][piece].push_back({a, path, node, slot});
}

void Stitcher::register_hits() {
  for (int d = 0; d < 2; ++d) {
    hits_[d].resize(in_[d]->faces.size());
    for (std::size_t f = 0; f < in_[d]->faces.size(); ++f) hits_[d][f].resize(in_[d]->faces[f].pieces.size());
  }
  pos_.resize(paths_.size());
  for (std::size_t c = 0; c < paths_.size(); ++c) {
    const auto& nodes = paths_[c].nodes;
    pos_[c].assign(nodes.size(), {-1, -1});
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const ContourNode& n = nodes[k];
      const int ci = static_cast<int>(c);
      const int ki = static_cast<int>(k);
      switch (n.kind) {
        case NodeKind::Seed: break;
        case NodeKind::ArcA:
        case NodeKind::ArcB: {
          const int d = n.kind == NodeKind::ArcA ? 0 : 1;
          add_hit(d, n.face_from, n.piece_from, n.p, false, ci, ki, 0);
          add_hit(d, n.face_to, n.piece_to, n.p, false, ci, ki, 1);
          break;
        }
        case NodeKind::Infinity:
          add_hit(0, n.face_from, n.piece_from, n.p, true, ci, ki, 0);
          add_hit(1, n.face_to, n.piece_to, n.p, true, ci, ki, 1);
          break;
      }
    }
  }
  for (int d = 0; d < 2; ++d) {
    for (auto& face : hits_[d]) {
      for (auto& list : face) {
        std::sort(list.begin(), list.end(), [](const HitRef& x, const HitRef& y) { return x.angle < y.angle; });
        for (std::size_t i = 0; i < list.size(); ++i) {
          pos_[list[i].path][list[i].node][list[i].slot] = static_cast<int>(i);
        }
      }
    }
  }
}

int Stitcher::map_input_vertex(int d, int v) {
  int& slot = vmap_[d][v];
  if (slot < 0) {
    slot = static_cast<int>(out_.vertices.size());
    out_.vertices.push_back(in_[d]->vertices[v]);
  }
  return slot;
}

int Stitcher::seed_vertex(int seed) {
  int& slot = seed_v_[seed];
  if (slot < 0) {
    slot = static_cast<int>(out_.vertices.size());
    out_.vertices.push_back({VertexKind::OnLine, sweep_.seeds[seed].point});
  }
  return slot;
}

int Stitcher::node_vertex(int path, int node) {
  const ContourNode& n = paths_[path].nodes[node];
  if (n.kind == NodeKind::Seed) return seed_vertex(n.seed);
  int& slot = node_v_[path][node];
  if (slot < 0) {
    slot = static_cast<int>(out_.vertices.size());
    out_.vertices.push_back({n.kind == NodeKind::Infinity ? VertexKind::AtInfinity : VertexKind::Inner, n.p});
  }
  return slot;
}

void Stitcher::build_face(const Interval& iv) {
  const int x = iv.side;
  const int y = 1 - x;
  const VdFace& f = in_[x]->faces[iv.face];
  VdFace of;
  of.site = out_site(x, f.site);
  of.lx0 = iv.x0;
  of.lx1 = iv.x1;

  const int seed_left = [&] {
    const std::size_t k = static_cast<std::size_t>(&iv - sweep_.intervals.data());
    return k == 0 ? -1 : sweep_.intervals[k - 1].seed_right;
  }();

  enum class Mode { Chain, Contour } mode;
  int piece = 0;
  int cursor = -1;  // index of the last hit passed on the current piece
  int path = -1;
  int node = -1;
  int step = 0;

  auto enter_contour = [&](int c, int k) {
    const bool forward = (x == 0) == paths_[c].a_left;
    path = c;
    node = k;
    step = forward ? 1 : -1;
    const int last = static_cast<int>(paths_[c].nodes.size()) - 1;
    if ((step > 0 && k == last) || (step < 0 && k == 0)) stall("contour walk runs off a path end");
    mode = Mode::Contour;
  };

  if (iv.seed_right >= 0) {
    const auto [c, k] = seed_nodes_[iv.seed_right];
    of.verts.push_back(seed_vertex(iv.seed_right));
    enter_contour(c, k);
  } else {
    if (iv.x1 != f.lx1) stall("l-edge ends inside a face without a seed");
    of.verts.push_back(map_input_vertex(x, f.verts[0]));
    mode = Mode::Chain;
  }

  const std::size_t guard = 4 * (f.verts.size() + 8) + 16 * paths_.size() + 1024;
  for (std::size_t it = 0;; ++it) {
    if (it > guard) stall("face walk does not close");
    if (mode == Mode::Chain) {
      const auto& list = hits_[x][iv.face][piece];
      const int nb = f.pieces[piece].neighbor;
      const int next = cursor + 1;
      if (next < static_cast<int>(list.size())) {
        of.pieces.push_back({nb < 0 ? -1 : out_site(x, nb)});
        of.verts.push_back(node_vertex(list[next].path, list[next].node));
        enter_contour(list[next].path, list[next].node);
        continue;
      }
      of.pieces.push_back({nb < 0 ? -1 : out_site(x, nb)});
      ++piece;
      cursor = -1;
      of.verts.push_back(map_input_vertex(x, f.verts[piece]));
      if (piece == static_cast<int>(f.pieces.size())) {
        if (seed_left >= 0 || iv.x0 != f.lx0) stall("face chain ends away from its l-edge");
        break;
      }
      continue;
    }
    const ContourComponent& c = paths_[path];
    const int edge = step > 0 ? node : node - 1;
    const int other = y == 0 ? c.sites_a[edge] : c.sites_b[edge];
    node += step;
    const ContourNode& n = c.nodes[node];
    of.pieces.push_back({out_site(y, other)});
    of.verts.push_back(node_vertex(path, node));
    if (n.kind == NodeKind::Seed) {
      if (n.seed != seed_left) stall("contour returns to the axis at the wrong seed");
      break;
    }
    const bool own_arc = (n.kind == NodeKind::ArcA && x == 0) || (n.kind == NodeKind::ArcB && x == 1);
    if (n.kind == NodeKind::Infinity) {
      // Continue along the stretch at infinity of the input face.
      const int slot = x == 0 ? 0 : 1;
      const int fc = x == 0 ? n.face_from : n.face_to;
      const int pc = x == 0 ? n.piece_from : n.piece_to;
      if (fc != iv.face) stall("infinite end in a foreign face");
      piece = pc;
      cursor = pos_[path][node][slot];
      mode = Mode::Chain;
    } else if (own_arc) {
      int slot;
      if (n.face_from == iv.face) {
        slot = 0;
        piece = n.piece_from;
      } else if (n.face_to == iv.face) {
        slot = 1;
        piece = n.piece_to;
      } else {
        stall("contour vertex on a foreign face");
      }
      cursor = pos_[path][node][slot];
      mode = Mode::Chain;
    }
  }
  out_.faces.push_back(std::move(of));
}

void Stitcher::link_twins() {
  std::map<std::tuple<int, int, int, int>, std::pair<int, int>> open;
  for (int fi = 0; fi < static_cast<int>(out_.faces.size()); ++fi) {
    VdFace& f = out_.faces[fi];
    for (int pi = 0; pi < static_cast<int>(f.pieces.size()); ++pi) {
      BoundaryPiece& p = f.pieces[pi];
      if (p.neighbor < 0) continue;
      const int u = f.verts[pi];
      const int v = f.verts[pi + 1];
      const auto key = std::make_tuple(std::min(u, v), std::max(u, v), std::min(f.site, p.neighbor),
                                       std::max(f.site, p.neighbor));
      auto it = open.find(key);
      if (it == open.end()) {
        open.emplace(key, std::make_pair(fi, pi));
        continue;
      }
      const auto [tf, tp] = it->second;
      p.twin_face = tf;
      p.twin_piece = tp;
      out_.faces[tf].pieces[tp].twin_face = fi;
      out_.faces[tf].pieces[tp].twin_piece = pi;
      open.erase(it);
    }
  }
  if (!open.empty()) stall("unpaired arc after stitching");
}

HalfPlaneVD Stitcher::run() {
  offset_ = static_cast<int>(in_[0]->sites.size());
  out_.sites = in_[0]->sites;
  out_.sites.insert(out_.sites.end(), in_[1]->sites.begin(), in_[1]->sites.end());
  for (int d = 0; d < 2; ++d) vmap_[d].assign(in_[d]->vertices.size(), -1);
  seed_v_.assign(sweep_.seeds.size(), -1);
  node_v_.resize(paths_.size());
  for (std::size_t c = 0; c < paths_.size(); ++c) node_v_[c].assign(paths_[c].nodes.size(), -1);
  register_hits();
  for (const Interval& iv : sweep_.intervals) build_face(iv);
  link_twins();
  return std::move(out_);
}

HalfPlaneVD append_sites(const HalfPlaneVD& va, const HalfPlaneVD& vb) {
  // One side has no faces: the other diagram survives unchanged.
  const bool a_live = !va.empty();
  HalfPlaneVD out = a_live ? va : vb;
  out.sites = va.sites;
  out.sites.insert(out.sites.end(), vb.sites.begin(), vb.sites.end());
  if (!a_live) {
    const int off = static_cast<int>(va.sites.size());
    for (auto& f : out.faces) {
      f.site += off;
      for (auto& p : f.pieces) {
        if (p.neighbor >= 0) p.neighbor += off;
      }
    }
  }
  return out;
}

}  // namespace

HalfPlaneVD merge_vdplus(const HalfPlaneVD& va, const HalfPlaneVD& vb, const MergeOptions& opts) {
  counters().merges++;
  if (va.empty() || vb.empty()) return append_sites(va, vb);
  const Sweep sweep = sweep_line(va, vb);
  MergeStats local;
  MergeStats& stats = opts.stats ? *opts.stats : local;
  stats.seeds += sweep.seeds.size();

  const SpokedVD sa(va);
  const SpokedVD sb(vb);
  SeedRegistry registry(sweep.seeds);
  SpokeTally tally;
  Tracer tracer(sa, sb, registry, opts, tally, stats, step_limit_for(va, vb));
  std::vector<ContourComponent> paths;
  std::vector<std::pair<int, int>> seed_nodes(sweep.seeds.size(), {-1, -1});
  for (std::size_t i = 0; i < sweep.seeds.size(); ++i) {
    if (registry.consumed(i)) continue;
    paths.push_back(tracer.run(i));
    ++stats.components;
    const auto& nodes = paths.back().nodes;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k].kind == NodeKind::Seed) {
        seed_nodes[nodes[k].seed] = {static_cast<int>(paths.size()) - 1, static_cast<int>(k)};
      }
    }
  }
  return Stitcher(va, vb, sweep, paths, seed_nodes).run();
}

}  // namespace udg
