#include "udg/sssp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "udg/awnn.hpp"
#include "udg/counters.hpp"

namespace udg {

Cell cell_of(Point p) {
  return {static_cast<std::int64_t>(std::floor(2.0 * p.x)), static_cast<std::int64_t>(std::floor(2.0 * p.y))};
}

GridIndex build_grid(std::span<const Point> pts) {
  GridIndex g;
  g.cell.reserve(pts.size());
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    if (!std::isfinite(pts[i].x) || !std::isfinite(pts[i].y)) {
      throw Error(ErrorCode::ParseError, "non-finite point " + std::to_string(i));
    }
    const Cell c = cell_of(pts[i]);
    g.cell.push_back(c);
    g.members[c].push_back(i);
  }
  return g;
}

std::array<Cell, 25> patch(Cell c) {
  std::array<Cell, 25> out;
  int k = 0;
  for (std::int64_t dj = -2; dj <= 2; ++dj) {
    for (std::int64_t di = -2; di <= 2; ++di) out[k++] = {c.i + di, c.j + dj};
  }
  return out;
}

namespace {

Point rotate(Point p, int quarter_turns) {
  switch (quarter_turns & 3) {
    case 1:
      return {-p.y, p.x};
    case 2:
      return {-p.x, -p.y};
    case 3:
      return {p.y, -p.x};
    default:
      return p;
  }
}

}  // namespace

Point Isometry::apply(Point p) const { return rotate(p, quarter_turns) + shift; }

Isometry Isometry::separating(std::span<const Point> sources, std::span<const Point> targets, Cell from, Cell to) {
  const std::int64_t di = to.i - from.i;
  const std::int64_t dj = to.j - from.j;
  if (di == 0 && dj == 0) throw Error(ErrorCode::NotSeparated, "cells coincide");
  Isometry iso;
  if (std::abs(dj) >= std::abs(di)) {
    iso.quarter_turns = dj > 0 ? 0 : 2;
  } else {
    iso.quarter_turns = di > 0 ? 1 : 3;
  }
  if (sources.empty() || targets.empty()) return iso;
  double tmin = kInf;
  for (const Point& t : targets) tmin = std::min(tmin, rotate(t, iso.quarter_turns).y);
  iso.shift = {-rotate(sources[0], iso.quarter_turns).x, -tmin};
  for (const Point& s : sources) {
    if (!(iso.apply(s).y < 0.0)) throw Error(ErrorCode::NotSeparated, "source on the target side");
  }
  return iso;
}

namespace {

void relax(DistTable& dt, int b, double value, int a) {
  if (value < dt.dist[b]) {
    dt.dist[b] = value;
    dt.pred[b] = a;
  }
}

// Direct evaluation of the first-neighbor index over sorted_a[lo, hi).
int first_within(std::span<const Point> pts, std::span<const int> sorted_a, std::size_t lo, std::size_t hi,
                 int b) {
  for (std::size_t i = lo; i < hi; ++i) {
    if (distance(pts[sorted_a[i]], pts[b]) <= 1.0) return static_cast<int>(i);
  }
  return -1;
}

void partition_range(std::span<const Point> pts, std::span<const int> sorted_a, const Isometry& iso,
                     std::size_t lo, std::size_t hi, std::vector<int> targets, std::span<const int> B,
                     std::vector<int>& out, std::size_t cutoff) {
  if (targets.empty()) return;
  if (hi - lo == 1 || (hi - lo) * targets.size() <= cutoff) {
    for (int k : targets) out[k] = first_within(pts, sorted_a, lo, hi, B[k]);
    return;
  }
  const std::size_t mid = (lo + hi) / 2;
  std::vector<WeightedSite> sites;
  sites.reserve(mid - lo);
  for (std::size_t i = lo; i < mid; ++i) {
    const Point p = iso.apply(pts[sorted_a[i]]);
    sites.push_back({sorted_a[i], p.x, p.y, 0.0});
  }
  const StaticNN nn(std::move(sites));
  std::vector<int> left;
  std::vector<int> right;
  for (int k : targets) {
    const Nearest hit = nn.query(iso.apply(pts[B[k]]));
    (distance(pts[hit.site_id], pts[B[k]]) <= 1.0 ? left : right).push_back(k);
  }
  partition_range(pts, sorted_a, iso, lo, mid, std::move(left), B, out, cutoff);
  partition_range(pts, sorted_a, iso, mid, hi, std::move(right), B, out, cutoff);
}

std::vector<Point> gather(std::span<const Point> pts, std::span<const int> ids) {
  std::vector<Point> out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(pts[i]);
  return out;
}

}  // namespace

std::vector<int> first_neighbor_partition(std::span<const Point> pts, std::span<const int> sorted_a,
                                          std::span<const int> B, Cell from, Cell to, const SsspOptions& opts) {
  std::vector<int> out(B.size(), -1);
  if (sorted_a.empty() || B.empty()) return out;
  const auto ap = gather(pts, sorted_a);
  const auto bp = gather(pts, B);
  const Isometry iso = Isometry::separating(ap, bp, from, to);
  std::vector<int> all(B.size());
  for (std::size_t k = 0; k < B.size(); ++k) all[k] = static_cast<int>(k);
  partition_range(pts, sorted_a, iso, 0, sorted_a.size(), std::move(all), B, out, opts.direct_cutoff);
  return out;
}

void update_pair(std::span<const Point> pts, std::span<const int> A, std::span<const int> B, Cell from, Cell to,
                 std::span<const double> snapshot, DistTable& dt, const SsspOptions& opts, SsspStats* stats) {
  std::vector<int> sorted;
  sorted.reserve(A.size());
  for (int a : A) {
    if (std::isfinite(snapshot[a])) sorted.push_back(a);
  }
  if (sorted.empty() || B.empty()) return;
  if (stats) stats->pair_updates++;

  if (sorted.size() * B.size() <= opts.direct_cutoff) {
    for (int b : B) {
      for (int a : sorted) {
        const double d = distance(pts[a], pts[b]);
        if (d <= 1.0) relax(dt, b, snapshot[a] + d, a);
      }
    }
    return;
  }

  std::sort(sorted.begin(), sorted.end(),
            [&](int x, int y) { return std::tie(snapshot[x], x) < std::tie(snapshot[y], y); });
  const auto ap = gather(pts, sorted);
  const auto bp = gather(pts, B);
  const Isometry iso = Isometry::separating(ap, bp, from, to);
  const std::vector<int> first = first_neighbor_partition(pts, sorted, B, from, to, opts);

  std::vector<std::vector<int>> groups(sorted.size());
  for (std::size_t k = 0; k < B.size(); ++k) {
    if (first[k] >= 0) groups[first[k]].push_back(B[k]);
  }
  DynamicNN nn;
  for (std::size_t i = sorted.size(); i-- > 0;) {
    const int a = sorted[i];
    const Point p = iso.apply(pts[a]);
    nn.insert({a, p.x, p.y, snapshot[a]});
    for (int b : groups[i]) {
      const int best = nn.query(iso.apply(pts[b])).site_id;
      const double d = distance(pts[best], pts[b]);
      if (d > 1.0) {
        if (stats) stats->nonadjacent++;
        continue;
      }
      relax(dt, b, snapshot[best] + d, best);
    }
  }
}

namespace {

// Sites from `from` (weights = snapshot) answer queries from `to`. The frame
// maps every site strictly below the axis and every query onto or above it.
template <class Frame>
void relax_across(std::span<const Point> pts, const std::vector<int>& from, const std::vector<int>& to,
                  std::span<const double> snapshot, DistTable& dt, Frame frame) {
  std::vector<WeightedSite> sites;
  for (int a : from) {
    if (!std::isfinite(snapshot[a])) continue;
    const Point p = frame(pts[a]);
    sites.push_back({a, p.x, p.y, snapshot[a]});
  }
  if (sites.empty()) return;
  const StaticNN nn(std::move(sites));
  for (int b : to) {
    const int best = nn.query(frame(pts[b])).site_id;
    relax(dt, b, snapshot[best] + distance(pts[best], pts[b]), best);
  }
}

void same_cell_rec(std::span<const Point> pts, std::vector<int> ids, std::span<const double> snapshot,
                   DistTable& dt, std::size_t cutoff) {
  const std::size_t n = ids.size();
  if (n <= 1) return;
  auto direct = [&] {
    for (int b : ids) {
      for (int a : ids) {
        if (a != b && std::isfinite(snapshot[a])) relax(dt, b, snapshot[a] + distance(pts[a], pts[b]), a);
      }
    }
  };
  if (n * n <= cutoff || n == 2) {
    direct();
    return;
  }
  // Split at the median of y, or of x when all y agree; the swap of x and y
  // is a reflection and keeps distances.
  for (int swap = 0; swap < 2; ++swap) {
    auto key = [&](int i) { return swap ? Point{pts[i].y, pts[i].x} : pts[i]; };
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      const Point p = key(a);
      const Point q = key(b);
      return std::tie(p.y, p.x, a) < std::tie(q.y, q.x, b);
    });
    std::size_t split = 0;
    for (std::size_t off = 0; off <= n / 2 && split == 0; ++off) {
      for (std::size_t k : {n / 2 - off, n / 2 + off}) {
        if (k >= 1 && k < n && key(ids[k - 1]).y < key(ids[k]).y) {
          split = k;
          break;
        }
      }
    }
    if (split == 0) continue;
    std::vector<int> lower(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(split));
    std::vector<int> upper(ids.begin() + static_cast<std::ptrdiff_t>(split), ids.end());
    const double top_of_lower = key(lower.back()).y;
    const double bottom_of_upper = key(upper.front()).y;
    const double x0 = key(ids.front()).x;
    relax_across(pts, lower, upper, snapshot, dt, [&](Point p) {
      const Point k = swap ? Point{p.y, p.x} : p;
      return Point{k.x - x0, k.y - bottom_of_upper};
    });
    relax_across(pts, upper, lower, snapshot, dt, [&](Point p) {
      const Point k = swap ? Point{p.y, p.x} : p;
      return Point{k.x - x0, top_of_lower - k.y};
    });
    same_cell_rec(pts, std::move(lower), snapshot, dt, cutoff);
    same_cell_rec(pts, std::move(upper), snapshot, dt, cutoff);
    return;
  }
  direct();  // every point coincides
}

}  // namespace

void same_cell_update(std::span<const Point> pts, std::span<const int> C, std::span<const double> snapshot,
                      DistTable& dt, const SsspOptions& opts) {
  same_cell_rec(pts, std::vector<int>(C.begin(), C.end()), snapshot, dt, opts.direct_cutoff);
}

DistTable sssp_wangxue(std::span<const Point> pts, int source, const SsspOptions& opts, SsspStats* stats) {
  const int n = static_cast<int>(pts.size());
  if (source < 0 || source >= n) throw Error(ErrorCode::UnknownSource, std::to_string(source));
  SsspStats local;
  SsspStats& st = stats ? *stats : local;
  const GridIndex grid = build_grid(pts);
  auto active = grid.members;
  DistTable dt{std::vector<double>(n, kInf), std::vector<int>(n, -1)};
  std::vector<double> snap(n, kInf);
  std::vector<double> before;
  dt.dist[source] = 0.0;

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  heap.push({0.0, source});
  counters().heap_ops++;

  auto take_snapshot = [&](const std::vector<int>& ids) {
    for (int a : ids) snap[a] = dt.dist[a];
  };
  auto remember = [&](const std::vector<int>& ids) {
    before.clear();
    for (int b : ids) before.push_back(dt.dist[b]);
  };
  auto push_changed = [&](const std::vector<int>& ids) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (dt.dist[ids[k]] < before[k]) {
        heap.push({dt.dist[ids[k]], ids[k]});
        counters().heap_ops++;
      }
    }
  };
  auto run = [&](const std::vector<int>& from, const std::vector<int>& to, Cell cf, Cell ct) {
    take_snapshot(from);
    remember(to);
    if (cf == ct) {
      st.same_cell_updates++;
      same_cell_update(pts, from, snap, dt, opts);
    } else {
      update_pair(pts, from, to, cf, ct, snap, dt, opts, &st);
    }
    push_changed(to);
  };

  double last = -kInf;
  while (!heap.empty()) {
    const auto [d, c] = heap.top();
    heap.pop();
    counters().heap_ops++;
    const Cell cc = grid.cell[c];
    const auto it = active.find(cc);
    if (it == active.end() || d != dt.dist[c]) continue;
    ++st.iterations;
    if (d < last) st.monotone = false;
    last = d;
    const std::vector<int> here = it->second;
    const auto cells = patch(cc);
    for (const Cell& q : cells) {
      const auto jt = active.find(q);
      if (jt != active.end()) st.patch_points += jt->second.size();
    }
    for (const Cell& q : cells) {
      const auto jt = active.find(q);
      if (jt != active.end()) run(jt->second, here, q, cc);
    }
    for (const Cell& q : cells) {
      const auto jt = active.find(q);
      if (jt != active.end()) run(here, jt->second, cc, q);
    }
    active.erase(cc);
  }
  return dt;
}

std::vector<std::pair<int, int>> build_udg_edges(std::span<const Point> pts) {
  const GridIndex grid = build_grid(pts);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    for (const Cell& q : patch(grid.cell[i])) {
      const auto it = grid.members.find(q);
      if (it == grid.members.end()) continue;
      for (int j : it->second) {
        if (j > i && distance(pts[i], pts[j]) <= 1.0) edges.emplace_back(i, j);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

DistTable dijkstra_baseline(std::span<const Point> pts, int source) {
  const int n = static_cast<int>(pts.size());
  if (source < 0 || source >= n) throw Error(ErrorCode::UnknownSource, std::to_string(source));
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : build_udg_edges(pts)) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  DistTable dt{std::vector<double>(n, kInf), std::vector<int>(n, -1)};
  std::vector<bool> done(n, false);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dt.dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = true;
    for (int v : adj[u]) {
      const double nd = d + distance(pts[u], pts[v]);
      if (nd < dt.dist[v]) {
        dt.dist[v] = nd;
        dt.pred[v] = u;
        heap.push({nd, v});
      }
    }
  }
  return dt;
}

double max_relative_deviation(const DistTable& a, const DistTable& b) {
  if (a.dist.size() != b.dist.size()) return kInf;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dist.size(); ++i) {
    const bool fa = std::isfinite(a.dist[i]);
    const bool fb = std::isfinite(b.dist[i]);
    if (fa != fb) return kInf;
    if (!fa) continue;
    worst = std::max(worst, std::abs(a.dist[i] - b.dist[i]) / std::max(1.0, std::abs(b.dist[i])));
  }
  return worst;
}

bool predecessors_consistent(std::span<const Point> pts, int source, const DistTable& dt) {
  const int n = static_cast<int>(pts.size());
  if (dt.dist[source] != 0.0) return false;
  for (int v = 0; v < n; ++v) {
    if (v == source || !std::isfinite(dt.dist[v])) continue;
    double total = 0.0;
    int cur = v;
    int steps = 0;
    while (cur != source) {
      const int p = dt.pred[cur];
      if (p < 0 || ++steps > n) return false;
      const double e = distance(pts[p], pts[cur]);
      if (e > 1.0) return false;
      total += e;
      cur = p;
    }
    if (std::abs(total - dt.dist[v]) > 1e-9 * (1.0 + dt.dist[v])) return false;
  }
  return true;
}

}  // namespace udg
