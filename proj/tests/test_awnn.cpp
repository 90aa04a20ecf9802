#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "support.hpp"
#include "udg/awnn.hpp"

using namespace udg;
using udg::test::random_query;
using udg::test::random_sites;
using udg::test::top_two;

namespace {

std::vector<NNOp> random_ops(Rng& rng, int n, double query_share, double width) {
  std::vector<NNOp> ops;
  int id = 0;
  for (int i = 0; i < n; ++i) {
    if (id == 0 || rng.uniform() >= query_share) {
      ops.push_back(InsertOp{{id++, rng.uniform(-width, width), rng.uniform(-3.0, -0.01), rng.uniform(-1.0, 1.0)}});
    } else {
      ops.push_back(QueryOp{random_query(rng, width)});
    }
  }
  return ops;
}

}  // namespace

TEST(DynamicNN, FlatBaseCase) {
  DynamicNN d;
  for (int i = 0; i < 8; ++i) d.insert({i, static_cast<double>(i), -1.0, 0.0});
  EXPECT_EQ(d.static_size(), 0u);
  EXPECT_EQ(d.buffer_size(), 0u);
  EXPECT_EQ(d.levels(), 1u);
  d.insert({8, 8.0, -1.0, 0.0});
  EXPECT_EQ(d.static_size() + d.buffer_size(), 9u);
  EXPECT_GT(d.static_size(), 0u);
}

TEST(DynamicNN, Examples) {
  DynamicNN d;
  d.insert({1, 0, -1, 0});
  EXPECT_EQ(d.query({0, 1}).distance, 2.0);
  d.insert({2, 2, -1, 1});
  const Nearest n = d.query({0, 1});
  EXPECT_EQ(n.site_id, 1);
  EXPECT_DOUBLE_EQ(n.distance, 2.0);
}

TEST(DynamicNN, Errors) {
  DynamicNN d;
  EXPECT_THROW(d.query({0, 1}), Error);
  try {
    d.insert({0, 0, 0.5, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SiteAboveLine);
  }
  d.insert({0, 0, -1, 0});
  try {
    d.query({0, -1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::QueryBelowLine);
  }
}

TEST(DynamicNN, InvariantAfterEveryInsert) {
  Rng rng(31);
  DynamicNN d;
  const int n = 10000;
  const auto sites = random_sites(rng, n, 0, 100.0);
  for (const auto& s : sites) {
    d.insert(s);
    ASSERT_TRUE(d.invariant_holds()) << d.size();
  }
  EXPECT_EQ(d.retained_sites(), static_cast<std::size_t>(n));
  EXPECT_LE(d.retained_sites(), 8u * n);
  // Rebuilds are spaced |P| / log |P| apart, so log |P| per doubling.
  const double lg = std::log2(static_cast<double>(n));
  EXPECT_GE(static_cast<double>(d.flushes()), lg);
  EXPECT_LE(static_cast<double>(d.flushes()), lg * lg);
  EXPECT_LE(static_cast<double>(d.levels()), lg);
}

TEST(DynamicNN, InterleavedAgainstBruteforce) {
  Rng rng(32);
  DynamicNN d;
  BruteNN brute;
  std::vector<WeightedSite> sites;
  int checked = 0;
  for (const auto& op : random_ops(rng, 10000, 0.5, 30.0)) {
    if (const auto* ins = std::get_if<InsertOp>(&op)) {
      d.insert(ins->site);
      brute.insert(ins->site);
      sites.push_back(ins->site);
      continue;
    }
    const Point q = std::get<QueryOp>(op).q;
    const Nearest want = brute.query(q);
    const Nearest got = d.query(q);
    const auto [d1, d2] = top_two(sites, q);
    if (d2 - d1 <= 1e-7) continue;
    ++checked;
    ASSERT_EQ(got.site_id, want.site_id) << q.x << "," << q.y;
    ASSERT_NEAR(got.distance, want.distance, 1e-9);
  }
  EXPECT_GT(checked, 4000);
}

TEST(LogMethodNN, BinaryCarry) {
  Rng rng(33);
  LogMethodNN lm;
  const auto sites = random_sites(rng, 1024, 0, 30.0);
  for (int i = 0; i < 1024; ++i) {
    lm.insert(sites[i]);
    EXPECT_EQ(lm.bucket_count(), static_cast<std::size_t>(std::popcount(static_cast<unsigned>(i + 1))));
  }
  EXPECT_EQ(lm.bucket_count(), 1u);
  // Each site is rebuilt once per carry level.
  EXPECT_LE(lm.rebuild_work(), 1024u * 11u);
}

TEST(OfflineTreeNN, SingleInsert) {
  const std::vector<NNOp> ops{InsertOp{{0, 1, -1, 0}}, QueryOp{{1, 1}}};
  const auto ans = offline_solve(ops);
  ASSERT_EQ(ans.size(), 1u);
  EXPECT_EQ(ans[0].site_id, 0);
  EXPECT_DOUBLE_EQ(ans[0].distance, 2.0);
}

TEST(OfflineTreeNN, QueryBeforeInsert) {
  const std::vector<NNOp> ops{QueryOp{{1, 1}}, InsertOp{{0, 1, -1, 0}}};
  try {
    offline_solve(ops);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::QueryBeforeAnyInsert);
  }
}

TEST(OfflineTreeNN, PrefixOnly) {
  // The later site is much closer but not yet inserted.
  const std::vector<NNOp> ops{InsertOp{{0, 0, -1, 0}}, QueryOp{{5, 1}}, InsertOp{{1, 5, -0.5, 0}},
                              QueryOp{{5, 1}}};
  const auto ans = offline_solve(ops);
  ASSERT_EQ(ans.size(), 2u);
  EXPECT_EQ(ans[0].site_id, 0);
  EXPECT_EQ(ans[1].site_id, 1);
}

TEST(Solvers, FourWayAgreement) {
  Rng rng(34);
  for (int rep = 0; rep < 10; ++rep) {
    const auto ops = random_ops(rng, 1500, 0.4, 10.0);
    const auto offline = offline_solve(ops);
    DynamicNN d;
    LogMethodNN lm;
    BruteNN brute;
    std::vector<WeightedSite> sites;
    std::size_t k = 0;
    for (const auto& op : ops) {
      if (const auto* ins = std::get_if<InsertOp>(&op)) {
        d.insert(ins->site);
        lm.insert(ins->site);
        brute.insert(ins->site);
        sites.push_back(ins->site);
        continue;
      }
      const Point q = std::get<QueryOp>(op).q;
      const Nearest want = brute.query(q);
      const Nearest a = d.query(q);
      const Nearest b = lm.query(q);
      const Nearest c = offline[k++];
      const auto [d1, d2] = top_two(sites, q);
      if (d2 - d1 <= 1e-7) continue;
      ASSERT_EQ(a.site_id, want.site_id);
      ASSERT_EQ(b.site_id, want.site_id);
      ASSERT_EQ(c.site_id, want.site_id);
      ASSERT_NEAR(a.distance, want.distance, 1e-9);
      ASSERT_NEAR(b.distance, want.distance, 1e-9);
      ASSERT_NEAR(c.distance, want.distance, 1e-9);
    }
  }
}

TEST(Solvers, DegenerateGridSites) {
  // Integer positions on a few rows with equal weights: many collinear sites.
  Rng rng(35);
  DynamicNN d;
  LogMethodNN lm;
  std::vector<WeightedSite> sites;
  for (int i = 0; i < 600; ++i) {
    const WeightedSite s{i, std::floor(rng.uniform(-10, 10)), -std::floor(rng.uniform(1, 4)), 0.0};
    d.insert(s);
    lm.insert(s);
    sites.push_back(s);
  }
  for (int i = 0; i < 2000; ++i) {
    const Point q = random_query(rng, 10.0);
    const Nearest want = nearest_site_bruteforce(sites, q);
    const auto [d1, d2] = top_two(sites, q);
    if (d2 - d1 <= 1e-7) continue;
    EXPECT_NEAR(d.query(q).distance, want.distance, 1e-9);
    EXPECT_NEAR(lm.query(q).distance, want.distance, 1e-9);
  }
}

TEST(Ops, RoundTrip) {
  Rng rng(36);
  const auto ops = random_ops(rng, 50, 0.5, 5.0);
  const auto again = parse_ops(format_ops(ops));
  ASSERT_EQ(again.size(), ops.size());
  EXPECT_EQ(format_ops(again), format_ops(ops));
  EXPECT_THROW(parse_ops("I 1 2\n"), Error);
  EXPECT_THROW(parse_ops("X 1 2\n"), Error);
  EXPECT_EQ(parse_ops("# comment\n\nQ 0 1\n").size(), 1u);
}
