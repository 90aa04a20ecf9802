#include "udg/vdplus.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_set>

#include "udg/counters.hpp"
#include "udg/rng.hpp"
#include "udg/vdmerge.hpp"

namespace udg {

std::vector<LEdge> HalfPlaneVD::l_edge_seq() const {
  std::vector<LEdge> out;
  out.reserve(faces.size());
  for (const auto& f : faces) out.push_back({f.lx0, f.lx1, sites[f.site].id});
  return out;
}

int HalfPlaneVD::face_on_line(double x) const {
  if (faces.empty()) return -1;
  auto it = std::upper_bound(faces.begin(), faces.end(), x,
                             [](double v, const VdFace& f) { return v < f.lx1; });
  if (it == faces.end()) return static_cast<int>(faces.size()) - 1;
  return static_cast<int>(it - faces.begin());
}

std::size_t HalfPlaneVD::arc_count() const {
  std::size_t n = 0;
  for (const auto& f : faces) {
    for (const auto& p : f.pieces) n += p.neighbor >= 0 ? 1 : 0;
  }
  return n / 2;
}

std::size_t HalfPlaneVD::inner_vertex_count() const {
  return static_cast<std::size_t>(std::count_if(vertices.begin(), vertices.end(), [](const VdVertex& v) {
    return v.kind == VertexKind::Inner;
  }));
}

std::size_t HalfPlaneVD::line_vertex_count() const {
  return static_cast<std::size_t>(std::count_if(vertices.begin(), vertices.end(), [](const VdVertex& v) {
    return v.kind == VertexKind::OnLine;
  }));
}

long HalfPlaneVD::euler_characteristic() const {
  if (faces.empty()) return 0;
  const long v = static_cast<long>(inner_vertex_count() + line_vertex_count()) + 1;
  const long e = static_cast<long>(arc_count() + faces.size());
  return v - e + static_cast<long>(faces.size());
}

Nearest nearest_site_bruteforce(std::span<const WeightedSite> sites, Point q) {
  if (sites.empty()) throw Error(ErrorCode::EmptyInput, "no sites");
  Nearest best;
  for (const auto& s : sites) {
    const double d = weighted_distance(s, q);
    if (d < best.distance || (d == best.distance && s.id < best.site_id)) best = {s.id, d};
  }
  return best;
}

HalfPlaneVD singleton_vd(const WeightedSite& s) {
  if (!(s.y < 0.0)) throw Error(ErrorCode::SiteAboveLine, "site " + std::to_string(s.id));
  HalfPlaneVD vd;
  vd.sites = {s};
  vd.vertices = {{VertexKind::AtInfinity, {1.0, 0.0}}, {VertexKind::AtInfinity, {-1.0, 0.0}}};
  VdFace f;
  f.site = 0;
  f.verts = {0, 1};
  f.pieces = {BoundaryPiece{}};
  vd.faces.push_back(std::move(f));
  return vd;
}

namespace {

void validate_sites(std::span<const WeightedSite> sites) {
  if (sites.empty()) throw Error(ErrorCode::EmptyInput, "no sites");
  std::unordered_set<int> ids;
  for (const auto& s : sites) {
    if (!(s.y < 0.0)) throw Error(ErrorCode::SiteAboveLine, "site " + std::to_string(s.id));
    if (!std::isfinite(s.x) || !std::isfinite(s.w)) {
      throw Error(ErrorCode::ParseError, "non-finite site " + std::to_string(s.id));
    }
    if (!ids.insert(s.id).second) throw Error(ErrorCode::DuplicateId, std::to_string(s.id));
  }
}

HalfPlaneVD build_range(std::span<const WeightedSite> sites) {
  if (sites.size() == 1) return singleton_vd(sites[0]);
  const std::size_t half = sites.size() / 2;
  const HalfPlaneVD left = build_range(sites.first(half));
  const HalfPlaneVD right = build_range(sites.subspan(half));
  return merge_vdplus(left, right);
}

// Sites sharing a position: only the lightest (then lowest id) can own a face.
// Building from the survivors avoids bisectors that coincide with each other.
struct Deduped {
  std::vector<WeightedSite> kept;
  std::vector<WeightedSite> dropped;
};

Deduped dedupe(std::span<const WeightedSite> sites) {
  std::vector<std::size_t> order(sites.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& p = sites[a];
    const auto& q = sites[b];
    return std::tie(p.x, p.y, p.w, p.id) < std::tie(q.x, q.y, q.w, q.id);
  });
  std::vector<bool> drop(sites.size(), false);
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& p = sites[order[k - 1]];
    const auto& q = sites[order[k]];
    if (p.x == q.x && p.y == q.y) drop[order[k]] = true;
  }
  Deduped out;
  for (std::size_t i = 0; i < sites.size(); ++i) (drop[i] ? out.dropped : out.kept).push_back(sites[i]);
  return out;
}

HalfPlaneVD build_deduped(std::span<const WeightedSite> sites) {
  const Deduped d = dedupe(sites);
  HalfPlaneVD vd = build_range(d.kept);
  vd.sites.insert(vd.sites.end(), d.dropped.begin(), d.dropped.end());
  return vd;
}

bool retryable(const Error& e) {
  return e.code() == ErrorCode::TraceStall || e.code() == ErrorCode::DegenerateTangency ||
         e.code() == ErrorCode::NearTangency;
}

}  // namespace

HalfPlaneVD build_vdplus_exact(std::span<const WeightedSite> sites) {
  validate_sites(sites);
  return build_deduped(sites);
}

HalfPlaneVD build_vdplus_perturbed(std::span<const WeightedSite> sites, const BuildOptions& opts) {
  validate_sites(sites);
  Rng rng(opts.seed);
  const Deduped d = dedupe(sites);
  std::vector<WeightedSite> moved = d.kept;
  // Scaled by the extent of the positions: a common offset in the weights
  // does not change the diagram, so large weights must not enlarge the moves.
  double xlo = kInf, xhi = -kInf, ylo = kInf, yhi = -kInf;
  for (const auto& s : moved) {
    xlo = std::min(xlo, s.x);
    xhi = std::max(xhi, s.x);
    ylo = std::min(ylo, s.y);
    yhi = std::max(yhi, s.y);
  }
  const double eps = opts.perturb * (1.0 + std::max(xhi - xlo, yhi - ylo));
  for (auto& s : moved) {
    s.x += eps * rng.uniform(-1.0, 1.0);
    const double dy = std::min(eps, 0.5 * std::abs(s.y)) * rng.uniform(-1.0, 1.0);
    s.y += dy;
    s.w += eps * rng.uniform(-1.0, 1.0);
  }
  HalfPlaneVD vd = build_range(moved);
  vd.sites.insert(vd.sites.end(), d.dropped.begin(), d.dropped.end());
  return vd;
}

HalfPlaneVD build_vdplus(std::span<const WeightedSite> sites, const BuildOptions& opts) {
  validate_sites(sites);
  try {
    return build_deduped(sites);
  } catch (const Error& e) {
    if (!retryable(e) || opts.perturb <= 0.0 || opts.max_retries <= 0) throw;
  }
  for (int attempt = 1;; ++attempt) {
    BuildOptions o = opts;
    o.seed = opts.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt);
    try {
      counters().retries++;
      return build_vdplus_perturbed(sites, o);
    } catch (const Error& e) {
      if (!retryable(e) || attempt >= opts.max_retries) throw;
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

double vertex_angle(const VdVertex& v, const WeightedSite& s) {
  if (v.kind == VertexKind::AtInfinity) return std::atan2(v.p.y, v.p.x);
  return std::atan2(v.p.y - s.y, v.p.x - s.x);
}

}  // namespace

SpokedVD::SpokedVD(const HalfPlaneVD& base) : base_(&base) {
  offsets_.reserve(base.faces.size() + 1);
  for (const auto& f : base.faces) {
    offsets_.push_back(angles_.size());
    const WeightedSite& s = base.sites[f.site];
    for (int v : f.verts) angles_.push_back(vertex_angle(base.vertices[v], s));
  }
  offsets_.push_back(angles_.size());
}

int SpokedVD::sector_of(int face, double theta) const {
  const std::size_t lo = offsets_[face];
  const std::size_t hi = offsets_[face + 1];
  const auto first = angles_.begin() + static_cast<std::ptrdiff_t>(lo);
  const auto last = angles_.begin() + static_cast<std::ptrdiff_t>(hi);
  // First vertex with angle > theta closes the sector.
  const auto it = std::upper_bound(first, last, theta);
  const int k = static_cast<int>(hi - lo) - 1;
  return std::clamp(static_cast<int>(it - first) - 1, 0, k - 1);
}

std::vector<Spoke> SpokedVD::spokes() const {
  std::vector<Spoke> out;
  const HalfPlaneVD& vd = *base_;
  for (int fi = 0; fi < static_cast<int>(vd.faces.size()); ++fi) {
    const VdFace& f = vd.faces[fi];
    const WeightedSite& s = vd.sites[f.site];
    for (int i = 0; i < static_cast<int>(f.verts.size()); ++i) {
      const VdVertex& v = vd.vertices[f.verts[i]];
      Spoke sp;
      sp.face = fi;
      sp.vertex_index = i;
      sp.at_infinity = v.kind == VertexKind::AtInfinity;
      sp.to = v.p;
      sp.degenerate = v.kind == VertexKind::OnLine || (sp.at_infinity && v.p.y <= 0.0);
      if (!sp.degenerate) {
        // Where the ray from the site toward the vertex meets the axis.
        const Point dir = sp.at_infinity ? v.p : v.p - s.pos();
        sp.from = s.pos() + (-s.y / dir.y) * dir;
        sp.from.y = 0.0;
      } else {
        sp.from = sp.at_infinity ? Point{} : v.p;
      }
      out.push_back(sp);
    }
  }
  return out;
}

std::vector<SubRegion> SpokedVD::subregions() const {
  std::vector<SubRegion> out;
  const HalfPlaneVD& vd = *base_;
  for (int fi = 0; fi < static_cast<int>(vd.faces.size()); ++fi) {
    const VdFace& f = vd.faces[fi];
    auto live = [&](int i) {
      const VdVertex& v = vd.vertices[f.verts[i]];
      return v.kind == VertexKind::Inner || (v.kind == VertexKind::AtInfinity && v.p.y > 0.0);
    };
    for (int i = 0; i < static_cast<int>(f.pieces.size()); ++i) {
      const int lo = live(i) ? 1 : 0;
      const int hi = live(i + 1) ? 1 : 0;
      // The piece itself, the spokes that reach above the axis, and the axis
      // segment between them.
      out.push_back({fi, i, 1 + lo + hi + 1});
    }
  }
  return out;
}

SpokedVD add_spokes(const HalfPlaneVD& vd) { return SpokedVD(vd); }

}  // namespace udg
