#include <gtest/gtest.h>

#include <cmath>

#include "udg/gen.hpp"
#include "udg/rng.hpp"
#include "udg/sssp.hpp"
#include "udg/vdplus.hpp"

using namespace udg;

namespace {

// Direct relaxation: best adjacent source for every target.
std::vector<double> direct_pair(const std::vector<Point>& pts, const std::vector<int>& A, const std::vector<int>& B,
                                const std::vector<double>& snap, const std::vector<double>& start) {
  std::vector<double> out = start;
  for (int b : B) {
    for (int a : A) {
      const double d = distance(pts[a], pts[b]);
      if (d <= 1.0 && std::isfinite(snap[a])) out[b] = std::min(out[b], snap[a] + d);
    }
  }
  return out;
}

// Points of cell c with coordinates drawn uniformly.
std::vector<int> fill_cell(Rng& rng, std::vector<Point>& pts, Cell c, int k) {
  std::vector<int> ids;
  for (int i = 0; i < k; ++i) {
    ids.push_back(static_cast<int>(pts.size()));
    pts.push_back({(c.i + rng.uniform()) / 2.0, (c.j + rng.uniform()) / 2.0});
  }
  return ids;
}

}  // namespace

TEST(Grid, CellExamples) {
  EXPECT_EQ(cell_of({0.3, 0.7}), (Cell{0, 1}));
  EXPECT_EQ(cell_of({0.5, 0.5}), (Cell{1, 1}));
  EXPECT_EQ(cell_of({-0.1, -0.5}), (Cell{-1, -1}));
  const auto p = patch({0, 0});
  EXPECT_EQ(p.front(), (Cell{-2, -2}));
  EXPECT_EQ(p[1], (Cell{-1, -2}));
  EXPECT_EQ(p.back(), (Cell{2, 2}));
}

TEST(Grid, PairProperties) {
  Rng rng(41);
  for (int k = 0; k < 200000; ++k) {
    const Point a{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Point b = a + Point{rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)};
    const Cell ca = cell_of(a);
    const Cell cb = cell_of(b);
    if (ca == cb) EXPECT_LE(distance(a, b), std::sqrt(2.0) / 2.0);
    if (distance(a, b) <= 1.0) {
      EXPECT_LE(std::abs(ca.i - cb.i), 2);
      EXPECT_LE(std::abs(ca.j - cb.j), 2);
    }
  }
}

TEST(Isometry, SeparatesAllDirections) {
  Rng rng(42);
  for (int di = -2; di <= 2; ++di) {
    for (int dj = -2; dj <= 2; ++dj) {
      if (di == 0 && dj == 0) continue;
      std::vector<Point> pts;
      const auto A = fill_cell(rng, pts, {0, 0}, 20);
      const auto B = fill_cell(rng, pts, {di, dj}, 20);
      // Points on the closed cell edges.
      pts.push_back({0.0, 0.0});
      pts.push_back({di / 2.0, dj / 2.0});
      std::vector<Point> ap, bp;
      for (int a : A) ap.push_back(pts[a]);
      ap.push_back(pts[pts.size() - 2]);
      for (int b : B) bp.push_back(pts[b]);
      bp.push_back(pts.back());
      const Isometry iso = Isometry::separating(ap, bp, {0, 0}, {di, dj});
      for (const Point& p : ap) EXPECT_LT(iso.apply(p).y, 0.0);
      for (const Point& p : bp) EXPECT_GE(iso.apply(p).y, 0.0);
      for (std::size_t k = 1; k < ap.size(); ++k) {
        EXPECT_NEAR(distance(iso.apply(ap[k]), iso.apply(bp[k])), distance(ap[k], bp[k]), 1e-12);
      }
    }
  }
  EXPECT_THROW(Isometry::separating(std::vector<Point>{{0.1, 0.1}}, std::vector<Point>{{0.2, 0.2}}, {0, 0}, {0, 0}),
               Error);
}

TEST(Edges, ClosedUnitBoundary) {
  const std::vector<Point> pts{{0, 0}, {1, 0}};
  EXPECT_EQ(build_udg_edges(pts).size(), 1u);
}

TEST(Edges, MatchQuadraticScan) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pts = generate_points(GenKind::Uniform, 500, seed, 1.0);
    std::size_t want = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) want += distance(pts[i], pts[j]) <= 1.0 ? 1 : 0;
    }
    EXPECT_EQ(build_udg_edges(pts).size(), want);
  }
}

TEST(UpdatePair, SingleSourceRelaxes) {
  const std::vector<Point> pts{{0.1, 0.1}, {0.2, 0.6}, {0.4, 0.9}};
  std::vector<double> snap{1.0, kInf, kInf};
  DistTable dt{{1.0, kInf, kInf}, {-1, -1, -1}};
  const std::vector<int> A{0};
  const std::vector<int> B{1, 2};
  update_pair(pts, A, B, {0, 0}, {0, 1}, snap, dt, {0});
  EXPECT_DOUBLE_EQ(dt.dist[1], 1.0 + distance(pts[0], pts[1]));
  EXPECT_DOUBLE_EQ(dt.dist[2], 1.0 + distance(pts[0], pts[2]));
  EXPECT_EQ(dt.pred[1], 0);
}

TEST(UpdatePair, UnreachableTargetUnchanged) {
  const std::vector<Point> pts{{0.0, 0.0}, {0.45, 0.45}, {1.2, 0.0}};
  std::vector<double> snap{0.0, 0.3, kInf};
  DistTable dt{{0.0, 0.3, 5.0}, {-1, 0, -1}};
  const std::vector<int> A{0, 1};
  const std::vector<int> B{2};
  update_pair(pts, A, B, {0, 0}, {2, 0}, snap, dt, {0});
  EXPECT_EQ(dt.dist[2], std::min(5.0, 0.3 + distance(pts[1], pts[2])));
  const std::vector<Point> far{{0.0, 0.0}, {1.1, 0.0}};
  DistTable dt2{{0.0, kInf}, {-1, -1}};
  update_pair(far, std::vector<int>{0}, std::vector<int>{1}, {0, 0}, {2, 0}, std::vector<double>{0.0, kInf}, dt2,
              {0});
  EXPECT_EQ(dt2.dist[1], kInf);
}

TEST(UpdatePair, RandomPairsMatchDirectScan) {
  Rng rng(43);
  for (int rep = 0; rep < 150; ++rep) {
    std::vector<Point> pts;
    const Cell from{0, 0};
    Cell to;
    do {
      to = {static_cast<std::int64_t>(rng.below(5)) - 2, static_cast<std::int64_t>(rng.below(5)) - 2};
    } while (to == from);
    const auto A = fill_cell(rng, pts, from, 1 + static_cast<int>(rng.below(60)));
    const auto B = fill_cell(rng, pts, to, 1 + static_cast<int>(rng.below(60)));
    std::vector<double> snap(pts.size(), kInf);
    for (int a : A) snap[a] = rng.uniform() < 0.1 ? kInf : rng.uniform(0.0, 3.0);
    std::vector<double> start(pts.size(), kInf);
    for (int b : B) start[b] = rng.uniform() < 0.5 ? kInf : rng.uniform(0.0, 5.0);
    const auto want = direct_pair(pts, A, B, snap, start);
    DistTable dt{start, std::vector<int>(pts.size(), -1)};
    SsspStats st;
    update_pair(pts, A, B, from, to, snap, dt, {0}, &st);
    EXPECT_EQ(st.nonadjacent, 0u);
    for (int b : B) {
      if (std::isinf(want[b])) {
        EXPECT_TRUE(std::isinf(dt.dist[b]));
      } else {
        EXPECT_NEAR(dt.dist[b], want[b], 1e-9 * (1.0 + want[b])) << rep;
      }
    }
  }
}

TEST(FirstNeighbor, MatchesDirectScan) {
  Rng rng(44);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<Point> pts;
    const Cell to{static_cast<std::int64_t>(rng.below(3)) - 1, 2};
    const auto A = fill_cell(rng, pts, {0, 0}, 1 + static_cast<int>(rng.below(80)));
    const auto B = fill_cell(rng, pts, to, 1 + static_cast<int>(rng.below(80)));
    const auto got = first_neighbor_partition(pts, A, B, {0, 0}, to, {0});
    for (std::size_t k = 0; k < B.size(); ++k) {
      int want = -1;
      for (std::size_t i = 0; i < A.size() && want < 0; ++i) {
        if (distance(pts[A[i]], pts[B[k]]) <= 1.0) want = static_cast<int>(i);
      }
      EXPECT_EQ(got[k], want);
    }
  }
  // Everything within range of the first source.
  const std::vector<Point> near{{0.25, 0.25}, {0.3, 0.2}, {0.3, 0.6}, {0.2, 0.7}};
  const auto all = first_neighbor_partition(near, std::vector<int>{0, 1}, std::vector<int>{2, 3}, {0, 0}, {0, 1},
                                            {0});
  EXPECT_EQ(all, (std::vector<int>{0, 0}));
}

TEST(SameCell, SmallCases) {
  const std::vector<Point> one{{0.1, 0.1}};
  DistTable dt{{2.0}, {-1}};
  same_cell_update(one, std::vector<int>{0}, std::vector<double>{2.0}, dt);
  EXPECT_EQ(dt.dist[0], 2.0);
  const std::vector<Point> two{{0.1, 0.1}, {0.4, 0.1}};
  DistTable dt2{{1.0, 2.0}, {-1, -1}};
  same_cell_update(two, std::vector<int>{0, 1}, std::vector<double>{1.0, 2.0}, dt2);
  EXPECT_DOUBLE_EQ(dt2.dist[1], 1.3);
  EXPECT_EQ(dt2.dist[0], 1.0);
}

TEST(SameCell, RandomCellsMatchDirectScan) {
  Rng rng(45);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Point> pts;
    auto C = fill_cell(rng, pts, {3, -1}, 200);
    // Repeated rows and columns exercise the split fallback.
    for (int k = 0; k < 20; ++k) pts[C[k]].y = pts[C[0]].y;
    for (int k = 20; k < 40; ++k) pts[C[k]].x = pts[C[20]].x;
    std::vector<double> snap(pts.size());
    for (int c : C) snap[c] = rng.uniform() < 0.2 ? kInf : rng.uniform(0.0, 4.0);
    std::vector<double> want = snap;
    for (int b : C) {
      for (int a : C) {
        if (a != b && std::isfinite(snap[a])) want[b] = std::min(want[b], snap[a] + distance(pts[a], pts[b]));
      }
    }
    DistTable dt{snap, std::vector<int>(pts.size(), -1)};
    same_cell_update(pts, C, snap, dt, {0});
    for (int b : C) {
      if (std::isinf(want[b])) {
        EXPECT_TRUE(std::isinf(dt.dist[b]));
      } else {
        EXPECT_NEAR(dt.dist[b], want[b], 1e-9 * (1.0 + want[b]));
      }
    }
  }
  // All points identical.
  const std::vector<Point> same(10, Point{0.2, 0.2});
  std::vector<int> ids(10);
  for (int i = 0; i < 10; ++i) ids[i] = i;
  std::vector<double> snap(10, kInf);
  snap[3] = 1.5;
  DistTable dt{snap, std::vector<int>(10, -1)};
  same_cell_update(same, ids, snap, dt, {0});
  for (int i = 0; i < 10; ++i) EXPECT_EQ(dt.dist[i], 1.5);
}

TEST(Sssp, CollinearChain) {
  const std::vector<Point> pts{{0, 0}, {0.9, 0}, {1.8, 0}};
  const DistTable dt = sssp_wangxue(pts, 0);
  EXPECT_EQ(dt.dist[0], 0.0);
  EXPECT_DOUBLE_EQ(dt.dist[1], 0.9);
  EXPECT_DOUBLE_EQ(dt.dist[2], 1.8);
  EXPECT_EQ(dt.pred[2], 1);
  const auto edges = build_udg_edges(pts);
  EXPECT_EQ(edges.size(), 2u);
  const DistTable base = dijkstra_baseline(pts, 0);
  EXPECT_DOUBLE_EQ(base.dist[2], 1.8);
}

TEST(Sssp, FarClusterUnreachable) {
  std::vector<Point> pts{{0, 0}, {0.5, 0.2}, {0.9, 0.4}, {10, 10}, {10.3, 10}};
  const DistTable dt = sssp_wangxue(pts, 0);
  EXPECT_TRUE(std::isfinite(dt.dist[2]));
  EXPECT_TRUE(std::isinf(dt.dist[3]));
  EXPECT_TRUE(std::isinf(dt.dist[4]));
  EXPECT_EQ(dt.pred[3], -1);
}

TEST(Sssp, UnknownSource) {
  const std::vector<Point> pts{{0, 0}};
  try {
    sssp_wangxue(pts, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownSource);
  }
  EXPECT_THROW(dijkstra_baseline(pts, -1), Error);
}

TEST(Sssp, MatchesDijkstra) {
  const GenKind kinds[] = {GenKind::Uniform, GenKind::Clusters, GenKind::Chain, GenKind::OneCell};
  for (GenKind kind : kinds) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      for (std::size_t n : {100u, 400u}) {
        for (std::size_t cutoff : {0u, 64u}) {
          const auto pts = generate_points(kind, n, seed, 1.0);
          SsspStats st;
          const DistTable got = sssp_wangxue(pts, 0, {cutoff}, &st);
          const DistTable want = dijkstra_baseline(pts, 0);
          EXPECT_LE(max_relative_deviation(got, want), 1e-9) << to_string(kind) << " seed " << seed << " n " << n;
          EXPECT_TRUE(predecessors_consistent(pts, 0, got));
          EXPECT_TRUE(st.monotone);
          EXPECT_EQ(st.nonadjacent, 0u);
          EXPECT_LE(st.patch_points, 25 * n);
        }
      }
    }
  }
}

TEST(Generators, Deterministic) {
  for (GenKind kind : {GenKind::Uniform, GenKind::Clusters, GenKind::Chain, GenKind::OneCell}) {
    const auto a = generate_points(kind, 300, 7, 2.0);
    const auto b = generate_points(kind, 300, 7, 2.0);
    ASSERT_EQ(a.size(), 300u);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].x, b[i].x);
      EXPECT_EQ(a[i].y, b[i].y);
    }
  }
  for (const Point& p : generate_points(GenKind::OneCell, 500, 3)) EXPECT_EQ(cell_of(p), (Cell{0, 0}));
  EXPECT_TRUE(generate_points(GenKind::Uniform, 0, 1).empty());
  EXPECT_THROW(parse_gen_kind("spiral"), Error);
}
