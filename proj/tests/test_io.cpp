#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "udg/io.hpp"

using namespace udg;

namespace {

std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

}  // namespace

TEST(Io, PointsRoundTrip) {
  const std::vector<Point> pts{{0.1, -2.5}, {1e-300, 3.0}, {0.30000000000000004, 7.0}};
  const auto back = parse_points(format_points(pts));
  ASSERT_EQ(back.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(back[i].x, pts[i].x);
    EXPECT_EQ(back[i].y, pts[i].y);
  }
}

TEST(Io, CommentsAndErrors) {
  const auto pts = parse_points("# header\n\n1 2  # trailing\n 3 4\n");
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[1].x, 3.0);
  const auto sites = parse_sites("0 -1 0.5\n2 -3 0\n");
  ASSERT_EQ(sites.size(), 2u);
  EXPECT_EQ(sites[1].id, 1);
  EXPECT_EQ(sites[0].w, 0.5);

  for (const char* bad : {"1\n", "1 2 3\n", "1 x\n", "nan 1\n", "inf 0\n"}) {
    try {
      parse_points(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
  }
  try {
    parse_sites("0 -1 0\n0 -1\n");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Io, DiagramRoundTrip) {
  Rng rng(11);
  for (int n : {1, 2, 7, 60, 300}) {
    const auto sites = test::random_sites(rng, n, 0, 10.0, -3.0, -0.01, 2.0);
    const HalfPlaneVD vd = build_vdplus(sites);
    const std::string text = serialize_vd(vd);
    const HalfPlaneVD back = parse_vd(text);
    EXPECT_TRUE(back == vd) << n;
    EXPECT_EQ(serialize_vd(back), text);
  }
}

TEST(Io, DiagramParseErrors) {
  const std::string good = serialize_vd(build_vdplus(std::vector<WeightedSite>{{0, 0.0, -1.0, 0.0}, {1, 2.0, -1.0, 0.0}}));
  EXPECT_NO_THROW(parse_vd(good));
  for (const std::string& bad : {std::string(""), good.substr(0, good.size() / 2), good + "extra\n",
                                 std::string("vdplus\nsites 1\n0 0 -1\n")}) {
    try {
      parse_vd(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
  }
}

TEST(Io, DistCsv) {
  const std::vector<Point> pts{{0, 0}, {0.5, 0}, {9, 9}};
  DistTable dt;
  dt.dist = {0.0, 0.5, kInf};
  dt.pred = {-1, 0, -1};
  EXPECT_EQ(format_dist_csv(pts, dt), "id,x,y,dist,pred\n0,0,0,0,\n1,0.5,0,0.5,0\n2,9,9,inf,\n");
}

TEST(Io, SvgCounts) {
  Rng rng(5);
  for (int n : {1, 3, 40}) {
    const auto sites = test::random_sites(rng, n, 0, 8.0, -3.0, -0.01, 1.5);
    const HalfPlaneVD vd = build_vdplus(sites);
    const std::string svg = svg_diagram(vd);
    EXPECT_EQ(occurrences(svg, "class=\"arc\""), vd.arc_count()) << n;
    EXPECT_EQ(occurrences(svg, "class=\"ledge\""), vd.faces.size()) << n;
    EXPECT_EQ(occurrences(svg, "<circle"), sites.size());
    EXPECT_EQ(svg.find("nan"), std::string::npos);
  }
  const std::vector<Point> pts{{0, 0}, {0.5, 0}, {1, 0}, {5, 5}};
  DistTable dt;
  dt.dist = {0, 0.5, 1, kInf};
  dt.pred = {-1, 0, 1, -1};
  EXPECT_EQ(occurrences(svg_tree(pts, dt), "class=\"edge\""), 2u);
}
