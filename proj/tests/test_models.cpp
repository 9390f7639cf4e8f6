#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hypcert/model/free_tree.hpp"
#include "hypcert/model/h2.hpp"
#include "hypcert/model/metric_graph.hpp"

using namespace hypcert;

namespace {

double cosh_distance(const h2::point& p, const h2::point& q) {
  return std::acosh(1.0 + ((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y)) / (2.0 * p.y * q.y));
}

// Breadth-first census of reduced words, independent of the library ball.
std::size_t bfs_census(int rank, int R) {
  std::set<std::string> seen{""};
  std::vector<std::string> frontier{""};
  const std::string letters = "aAbBcCdD";
  for (int step = 0; step < R; ++step) {
    std::vector<std::string> next;
    for (const auto& w : frontier)
      for (int k = 0; k < 2 * rank; ++k) {
        char c = letters[static_cast<std::size_t>(k)];
        std::string nw = w;
        char inv = static_cast<char>(std::isupper(c) ? std::tolower(c) : std::toupper(c));
        if (!nw.empty() && nw.back() == inv)
          nw.pop_back();
        else
          nw.push_back(c);
        if (seen.insert(nw).second) next.push_back(nw);
      }
    frontier = next;
  }
  return seen.size();
}

}  // namespace

TEST(H2, DistanceExamples) {
  h2::model m;
  EXPECT_NEAR(m.distance({0, 1}, {0, 2}), std::log(2.0), 1e-14);
  EXPECT_NEAR(m.distance({0, 1}, {0, 2}), cosh_distance({0, 1}, {0, 2}), 1e-14);
  EXPECT_THROW(m.distance({0, 0}, {0, 1}), input_error);
  EXPECT_THROW(m.distance({0, 1}, {0, -1}), input_error);
}

TEST(H2, DistanceIsStableFarOut) {
  h2::model m;
  // cosh form overflows at 1e200; the asinh form does not
  double d = m.distance({0, 1e-150}, {0, 1e150});
  EXPECT_NEAR(d, 300 * std::log(10.0), 1e-9);
}

TEST(H2, MetricAxiomsOnRandomTriples) {
  h2::model m;
  auto pts = h2::sample_ball_points({0.5, 2}, 6, 300, 1);
  for (std::size_t k = 0; k + 2 < pts.size(); k += 3) {
    double a = m.distance(pts[k], pts[k + 1]), b = m.distance(pts[k + 1], pts[k + 2]),
           c = m.distance(pts[k], pts[k + 2]);
    EXPECT_GE(a, 0.0);
    EXPECT_NEAR(a, m.distance(pts[k + 1], pts[k]), 1e-12);
    EXPECT_LE(c, a + b + 1e-9);
    EXPECT_NEAR(a, cosh_distance(pts[k], pts[k + 1]), 1e-7);
  }
  EXPECT_EQ(m.distance(pts[0], pts[0]), 0.0);
}

TEST(H2, MatrixNormalisation) {
  auto g = h2::matrix(4, 0, 0, 1);  // det 4 -> scaled by 1/2
  EXPECT_NEAR(g.a * g.d - g.b * g.c, 1.0, 1e-15);
  EXPECT_NEAR(g.a, 2.0, 1e-15);
  auto n = h2::matrix(-2, 0, 0, -0.5);
  EXPECT_GT(n.trace(), 0.0);
  auto z = h2::matrix(0, -1, 1, 0);  // trace 0: first nonzero entry made positive
  EXPECT_GT(z.b, 0.0);
  EXPECT_THROW(h2::matrix(0, 1, 1, 0), input_error);
  EXPECT_THROW(h2::matrix(1, 1, 1, 1), input_error);
}

TEST(H2, ApplyExamples) {
  h2::model m;
  auto p = m.apply(h2::matrix(2, 0, 0, 0.5), h2::point{0, 1});
  EXPECT_NEAR(p.x, 0.0, 1e-15);
  EXPECT_NEAR(p.y, 4.0, 1e-15);
  auto q = m.apply(m.identity(), h2::point{0.3, 0.7});
  EXPECT_EQ(q.x, 0.3);
  EXPECT_EQ(q.y, 0.7);
}

TEST(H2, ApplyPreservesDistances) {
  h2::model m;
  auto pts = h2::sample_ball_points({0, 1}, 4, 100, 2);
  std::vector<h2::moebius> gs{h2::matrix(1.25, 0.75, 0.75, 1.25), h2::matrix(1, 2, 0, 1), h2::matrix(1, 0, 2, 1),
                              h2::rotation(0.4), h2::matrix(3, 1, 2, 1)};
  for (const auto& g : gs)
    for (std::size_t k = 0; k + 1 < pts.size(); k += 2)
      EXPECT_NEAR(m.distance(m.apply(g, pts[k]), m.apply(g, pts[k + 1])), m.distance(pts[k], pts[k + 1]), 1e-9);
}

TEST(H2, GeodesicImaginaryAxis) {
  auto l = h2::line::from_endpoints({0, false}, h2::boundary::at_infinity());
  h2::model m;
  for (double t : {-2.0, 0.0, 1.5}) {
    auto p = l.point_at(t);
    EXPECT_NEAR(p.x, 0.0, 1e-15);
    EXPECT_NEAR(p.y, std::exp(t), 1e-12);
  }
  rng gen(4);
  for (int k = 0; k < 50; ++k) {
    double s = gen.uniform(-5, 5), t = gen.uniform(-5, 5);
    EXPECT_NEAR(m.distance(l.point_at(s), l.point_at(t)), std::fabs(s - t), 1e-9);
  }
}

TEST(H2, GeodesicUnitSemicircle) {
  auto l = h2::line::from_endpoints({-1, false}, {1, false});
  h2::model m;
  for (double t = -3; t <= 3; t += 0.5) {
    auto p = l.point_at(t);
    // orthogonal to the real axis: a circle centred on it
    EXPECT_NEAR(p.x * p.x + p.y * p.y, 1.0, 1e-12);
    EXPECT_NEAR(m.distance(l.point_at(t), l.point_at(0)), std::fabs(t), 1e-9);
  }
  EXPECT_NEAR(l.start().x, -1.0, 1e-12);
  EXPECT_NEAR(l.end().x, 1.0, 1e-12);
  EXPECT_THROW(h2::line::from_endpoints({1, false}, {1, false}), input_error);
}

TEST(H2, SegmentsHaveArclengthParameters) {
  h2::model m;
  auto pts = h2::sample_ball_points({0, 1}, 5, 40, 6);
  for (std::size_t k = 0; k + 1 < pts.size(); k += 2) {
    auto s = h2::segment(pts[k], pts[k + 1]);
    EXPECT_NEAR(s.length(), m.distance(pts[k], pts[k + 1]), 1e-8);
    EXPECT_NEAR(m.distance(s.start(), pts[k]), 0.0, 1e-7);
    EXPECT_NEAR(m.distance(s.finish(), pts[k + 1]), 0.0, 1e-7);
    auto samples = s.sample(5);
    for (std::size_t j = 1; j < samples.size(); ++j)
      EXPECT_NEAR(m.distance(samples[j - 1], samples[j]), s.length() / 4, 1e-7);
  }
  auto vertical = h2::segment(h2::point{2, 1}, h2::point{2, 5});
  EXPECT_NEAR(vertical.length(), std::log(5.0), 1e-12);
}

TEST(H2, BallSampleIsUniformInArea) {
  const double R = 3.0;
  auto s = h2::sample_ball_points({0, 1}, R, 20000, 7);
  h2::model m;
  std::size_t inner = 0;
  for (const auto& p : s) {
    double d = m.distance(p, {0, 1});
    EXPECT_LE(d, R + 1e-9);
    if (d <= R / 2) ++inner;
  }
  double expected = (std::cosh(R / 2) - 1) / (std::cosh(R) - 1);
  EXPECT_NEAR(static_cast<double>(inner) / 20000.0, expected, 0.01);
  auto tiny = h2::sample_ball({0, 1}, 0.0, 10, 1);
  EXPECT_EQ(tiny.size(), 1u);
}

TEST(FreeTree, DistanceAndApply) {
  ftree::free_tree t{2};
  EXPECT_EQ(t.distance(word{}, words::parse("ab", 2)), 2.0);
  EXPECT_EQ(t.apply(word{1}, word{2}), words::parse("ab", 2));
  EXPECT_EQ(t.apply(t.identity(), word{2, 1}), (word{2, 1}));
  EXPECT_THROW(t.distance(word{1, -1}, word{}), input_error);
  EXPECT_THROW(t.distance(word{3}, word{}), input_error);
}

TEST(FreeTree, MetricAxiomsAndIsometries) {
  ftree::free_tree t{2};
  auto ball = t.ball({}, 3);
  rng gen(3);
  for (int k = 0; k < 300; ++k) {
    const auto& x = ball[gen.below(ball.size())];
    const auto& y = ball[gen.below(ball.size())];
    const auto& z = ball[gen.below(ball.size())];
    EXPECT_LE(t.distance(x, z), t.distance(x, y) + t.distance(y, z));
    EXPECT_EQ(t.distance(x, y), t.distance(y, x));
    word g = ball[gen.below(ball.size())];
    EXPECT_EQ(t.distance(t.apply(g, x), t.apply(g, y)), t.distance(x, y));
  }
}

TEST(FreeTree, GeodesicPath) {
  ftree::free_tree t{2};
  auto p = t.path(word{}, words::parse("a^3", 2));
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p[1], word{1});
  EXPECT_EQ(p[2], (word{1, 1}));
  EXPECT_EQ(p[3], (word{1, 1, 1}));
}

TEST(FreeTree, BallCensusByBreadthFirstSearch) {
  ftree::free_tree t{2};
  EXPECT_EQ(t.ball({}, 2).size(), bfs_census(2, 2));
  EXPECT_EQ(bfs_census(2, 2), 17u);
  EXPECT_EQ(ftree::ball_census(2, 2), 17);
  EXPECT_EQ(t.ball({}, 4).size(), bfs_census(2, 4));
  ftree::free_tree t3{3};
  EXPECT_EQ(t3.ball({}, 3).size(), bfs_census(3, 3));
  auto s = ftree::sample_ball(t, {}, 2, 100);
  EXPECT_EQ(s.size(), 17u);
  EXPECT_EQ(ftree::sample_ball(t, {}, 0.1, 100).size(), 1u);
}

TEST(FreeTree, RaysAreCanonical) {
  auto r1 = ftree::ray::make({1, 2}, {2});
  auto r2 = ftree::ray::make({1}, {2, 2});
  EXPECT_EQ(r1, r2);
  EXPECT_TRUE(r1.prefix == word{1});
  auto r3 = ftree::ray::make({}, {1, 2});
  auto shifted = ftree::translate(word{-2, -1}, ftree::ray::make({1, 2}, {1, 2}));
  EXPECT_EQ(shifted, r3);
  EXPECT_EQ(r3.truncate(5), (word{1, 2, 1, 2, 1}));
}

TEST(Graph, SingleEdgeAndPaths) {
  graph::metric_graph g(2, {{0, 1, 1.0}});
  EXPECT_EQ(g.distance(0, 1), 1.0);
  auto c = graph::cycle(6);
  EXPECT_EQ(c.distance(0, 3), 3.0);
  EXPECT_EQ(c.path(0, 2).size(), 3u);
  EXPECT_THROW(graph::metric_graph(3, {{0, 1, 1.0}}), input_error);
  EXPECT_THROW(graph::metric_graph(2, {{0, 1, -1.0}}), input_error);
}

TEST(Graph, IsometriesPreserveTable) {
  auto c = graph::cycle(5);
  std::vector<int> rot{1, 2, 3, 4, 0};
  EXPECT_NO_THROW(c.validate(rot));
  std::vector<int> bad{1, 0, 2, 3, 4};
  EXPECT_THROW(c.validate(bad), input_error);
  for (int u = 0; u < 5; ++u)
    for (int v = 0; v < 5; ++v) EXPECT_EQ(c.distance(c.apply(rot, u), c.apply(rot, v)), c.distance(u, v));
  EXPECT_TRUE(c.is_identity(c.power(rot, 5)));
}

TEST(Graph, BallBeyondDiameterIsEverything) {
  auto g = graph::grid(4);
  EXPECT_EQ(g.sample_ball(0, 100, 1000).size(), 16u);
  EXPECT_EQ(g.sample_ball(0, 1, 1000).size(), 3u);
}
