#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "hypcert/metric/gromov.hpp"
#include "hypcert/metric/packing.hpp"
#include "hypcert/metric/tripod.hpp"
#include "hypcert/model/free_tree.hpp"
#include "hypcert/model/h2.hpp"
#include "hypcert/model/metric_graph.hpp"

using namespace hypcert;

namespace {

// Independent oracles kept deliberately naive.
double cosh_distance(double px, double py, double qx, double qy) {
  return std::acosh(1.0 + ((px - qx) * (px - qx) + (py - qy) * (py - qy)) / (2.0 * py * qy));
}

std::size_t common_prefix(const std::string& u, const std::string& v) {
  std::size_t c = 0;
  while (c < u.size() && c < v.size() && u[c] == v[c]) ++c;
  return c;
}

// Words as strings over a,A,b,B: distance from the common prefix.
double string_tree_distance(const std::string& u, const std::string& v) {
  return static_cast<double>(u.size() + v.size() - 2 * common_prefix(u, v));
}

std::size_t brute_force_pack(const sampled_space& s, const std::vector<std::size_t>& region, double r) {
  const std::size_t n = region.size();
  std::size_t best = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::size_t cnt = 0;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!((mask >> i) & 1)) continue;
      ++cnt;
      for (std::size_t j = i + 1; j < n && ok; ++j)
        if (((mask >> j) & 1) && !(s.d(region[i], region[j]) > 2 * r + 1e-9)) ok = false;
    }
    if (ok) best = std::max(best, cnt);
  }
  return best;
}

std::size_t brute_force_cover(const sampled_space& s, const std::vector<std::size_t>& region, double r) {
  const std::size_t n = s.size();
  std::size_t best = n + 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::size_t cnt = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (cnt >= best) continue;
    bool ok = true;
    for (std::size_t p : region) {
      bool hit = false;
      for (std::size_t c = 0; c < n && !hit; ++c) hit = ((mask >> c) & 1) && s.d(c, p) <= r + 1e-9;
      if (!hit) {
        ok = false;
        break;
      }
    }
    if (ok) best = cnt;
  }
  return best;
}

sampled_space f2_ball(long R) {
  ftree::free_tree t{2};
  return ftree::to_sampled(t, t.ball({}, R));
}

}  // namespace

TEST(SampledSpace, RejectsBadMatrices) {
  EXPECT_THROW(sampled_space({"p", "q"}, {0, 1, 2, 0}), input_error);
  EXPECT_THROW(sampled_space({"p", "q"}, {0, -1, -1, 0}), input_error);
  EXPECT_THROW(sampled_space({"p", "q", "r"}, {0, 1, 5, 1, 0, 1, 5, 1, 0}), input_error);
  EXPECT_THROW(sampled_space({"p", "p"}, {0, 1, 1, 0}), input_error);
  EXPECT_THROW(sampled_space({"p", "q"}, {0, NAN, NAN, 0}), input_error);
  sampled_space ok({"p", "q"}, {0, 1, 1, 0});
  EXPECT_THROW(ok.index_of("zz"), input_error);
}

TEST(GromovProduct, BaseProductIsZero) {
  auto s = f2_ball(2);
  EXPECT_EQ(gromov_product(s, "ab", "a", "a"), 0.0);
}

TEST(GromovProduct, TreeMatchesCommonPrefixOracle) {
  ftree::free_tree t{2};
  word a2 = words::parse("a^2", 2), ab = words::parse("ab", 2);
  EXPECT_EQ(gromov_product(t, a2, ab, word{}), static_cast<double>(common_prefix("aa", "ab")));
  EXPECT_EQ(gromov_product(t, a2, ab, word{}), 1.0);
}

TEST(GromovProduct, HyperbolicPlaneMatchesCoshIdentity) {
  h2::model m;
  double g = gromov_product(m, h2::point{0, 2}, h2::point{0, 1}, h2::point{0, 1});
  EXPECT_NEAR(g, 0.0, 1e-12);
  double dxy = cosh_distance(0, 1, 0, 2);
  EXPECT_NEAR(m.distance({0, 1}, {0, 2}), dxy, 1e-12);
  EXPECT_NEAR(dxy, std::log(2.0), 1e-12);
}

TEST(GromovProduct, UnknownIdIsInputError) {
  auto s = f2_ball(1);
  EXPECT_THROW(gromov_product(s, "a", "zz", "e"), input_error);
}

TEST(GromovProduct, SplitIdentityOnRandomTriples) {
  auto pts = h2::sample_ball_points({0.3, 1.7}, 4.0, 60, 11);
  h2::model m;
  for (std::size_t k = 0; k + 2 < pts.size(); k += 3) {
    const auto& x = pts[k];
    const auto& y = pts[k + 1];
    const auto& z = pts[k + 2];
    double gx = gromov_product(m, y, z, x), gy = gromov_product(m, x, z, y);
    EXPECT_GE(gx, 0.0);
    EXPECT_LE(gx, std::min(m.distance(x, y), m.distance(x, z)) + 1e-12);
    EXPECT_NEAR(gx + gy, m.distance(x, y), 1e-9);
  }
}

TEST(FourPointDelta, TreeSubtreeIsExactlyZero) {
  auto s = f2_ball(3);
  auto e = four_point_delta(s);
  EXPECT_EQ(e.delta_hat, 0.0);
  EXPECT_EQ(e.quadruples_checked, 53ull * 52 * 51 * 50 / 24);
}

TEST(FourPointDelta, UnitSquareCorners) {
  const double r2 = std::sqrt(2.0);
  sampled_space sq({"00", "10", "11", "01"}, {0, 1, r2, 1, 1, 0, 1, r2, r2, 1, 0, 1, 1, r2, 1, 0});
  // sides pair to 2, diagonals to 2*sqrt(2): (2 sqrt 2 - 2) / 2
  double by_hand = (2 * r2 - 2) / 2;
  EXPECT_NEAR(four_point_delta(sq).delta_hat, by_hand, 1e-12);
  EXPECT_NEAR(by_hand, 0.4142135623, 1e-9);
}

TEST(FourPointDelta, PaddedSinglePoint) {
  sampled_space s({"p0", "p1", "p2", "p3"}, std::vector<double>(16, 0.0));
  EXPECT_EQ(four_point_delta(s).delta_hat, 0.0);
}

TEST(FourPointDelta, Errors) {
  sampled_space s({"p", "q", "r"}, std::vector<double>(9, 0.0));
  EXPECT_THROW(four_point_delta(s), input_error);
  auto big = f2_ball(3);
  EXPECT_THROW(four_point_delta(big, delta_budget::exhaustive(20)), budget_error);
}

TEST(FourPointDelta, SampledIsLowerBoundAndMonotone) {
  auto pts = h2::sample_ball_points({0, 1}, 5.0, 60, 3);
  auto full = h2::to_sampled(pts);
  double ex = four_point_delta(full).delta_hat;
  double sm = four_point_delta(full, delta_budget::sample(5000, 9)).delta_hat;
  EXPECT_LE(sm, ex);
  std::vector<std::size_t> half;
  for (std::size_t k = 0; k < 30; ++k) half.push_back(k);
  EXPECT_LE(four_point_delta(full.subspace(half)).delta_hat, ex);
  EXPECT_GT(ex, 0.0);
}

TEST(FourPointDelta, HundredPointTreeScanIsFast) {
  ftree::free_tree t{2};
  auto pts = t.ball({}, 4);
  pts.resize(100);
  auto s = ftree::to_sampled(t, pts);
  auto start = std::chrono::steady_clock::now();
  auto e = four_point_delta(s);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(e.delta_hat, 0.0);
  EXPECT_LT(secs, 1.0);
}

TEST(Packing, FreeTreeBallFixtures) {
  auto s = f2_ball(2);
  ASSERT_EQ(s.size(), 17u);
  auto e = s.index_of("e");
  auto p1 = packing_number(s, e, 1, 1, count_mode::exact);
  EXPECT_EQ(*p1.pack_exact, 1u);
  auto p2 = packing_number(s, e, 2, 1, count_mode::exact);
  EXPECT_EQ(*p2.pack_exact, 4u);
  EXPECT_EQ(*p2.pack_exact, brute_force_pack(s, closed_ball(s, e, 2), 1));
  EXPECT_LE(p2.pack_greedy, *p2.pack_exact);
  EXPECT_EQ(p2.witness.size(), 4u);
}

TEST(Packing, SinglePoint) {
  sampled_space s({"p"}, {0.0});
  EXPECT_EQ(*packing_number(s, "p", 3, 0.5, count_mode::exact).pack_exact, 1u);
  EXPECT_EQ(packing_number(s, "p", 3, 0.5, count_mode::greedy).pack_greedy, 1u);
}

TEST(Packing, TiesAtTwiceRadiusAreNotSeparated) {
  sampled_space s({"p", "q"}, {0, 2, 2, 0});
  EXPECT_EQ(*packing_number(s, "p", 2, 1, count_mode::exact).pack_exact, 1u);
  EXPECT_EQ(*packing_number(s, "p", 2, 0.999, count_mode::exact).pack_exact, 2u);
}

TEST(Packing, CapExceededCarriesGreedyFallback) {
  auto s = f2_ball(3);
  try {
    packing_number(s, s.index_of("e"), 3, 1, count_mode::exact, 20);
    FAIL() << "expected a budget error";
  } catch (const packing_budget_error& e) {
    EXPECT_GE(e.greedy(), 1u);
  }
}

TEST(Packing, ExactAgreesWithBruteForceOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    auto g = graph::random_graph(14, 0.15, seed);
    auto s = g.to_sampled(g.ball(0, 1e9));
    std::vector<std::size_t> all(s.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    for (double r : {0.5, 1.0, 1.7}) {
      EXPECT_EQ(max_separated(s, all, r, count_mode::exact).size(), brute_force_pack(s, all, r)) << seed;
    }
  }
}

TEST(Covering, FreeTreeFixtures) {
  auto s = f2_ball(2);
  auto e = s.index_of("e");
  EXPECT_EQ(covering_number(s, closed_ball(s, e, 1), 1, count_mode::exact), 1u);
  auto region = closed_ball(s, e, 2);
  std::size_t cov = covering_number(s, region, 1, count_mode::exact);
  EXPECT_EQ(cov, brute_force_cover(s, region, 1));
  EXPECT_EQ(cov, 4u);
  // Pack(Y,2r) <= Cov(Y,2r) <= Pack(Y,r) with r = 1
  std::size_t pack2 = max_separated(s, region, 2, count_mode::exact).size();
  std::size_t cov2 = covering_number(s, region, 2, count_mode::exact);
  std::size_t pack1 = max_separated(s, region, 1, count_mode::exact).size();
  EXPECT_LE(pack2, cov2);
  EXPECT_LE(cov2, pack1);
  EXPECT_LE(covering_number(s, region, 1, count_mode::exact), covering_number(s, region, 1, count_mode::greedy));
}

TEST(Covering, EmptyRegionIsZero) {
  auto s = f2_ball(1);
  EXPECT_EQ(covering_number(s, {}, 1, count_mode::exact), 0u);
  EXPECT_THROW(covering_number(s, {0}, 0, count_mode::exact), input_error);
}

TEST(Tripod, TreeTripodCollapses) {
  ftree::free_tree t{2};
  auto tp = tripod_points(t, word{}, words::parse("a^2", 2), words::parse("ab", 2));
  word a{1};
  EXPECT_EQ(tp.c_x, a);
  EXPECT_EQ(tp.c_y, a);
  EXPECT_EQ(tp.c_z, a);
  EXPECT_EQ(tp.thinness, 0.0);
  EXPECT_EQ(string_tree_distance("aa", "ab"), 2.0);
}

TEST(Tripod, CollinearTripleIsThin) {
  h2::model m;
  auto tp = tripod_points(m, h2::point{0, 1}, h2::point{0, 2}, h2::point{0, 4});
  EXPECT_NEAR(tp.thinness, 0.0, 1e-9);
}

TEST(Tripod, HyperbolicTriangleWithinFourDelta) {
  h2::model m;
  h2::point x{0, 1}, y{0, 4}, z{1, 1};
  auto tp = tripod_points(m, x, y, z);
  std::vector<h2::point> dense;
  for (auto [p, q] : {std::pair{x, y}, std::pair{y, z}, std::pair{z, x}}) {
    auto seg = h2::segment(p, q).sample(40);
    dense.insert(dense.end(), seg.begin(), seg.end());
  }
  double delta = four_point_delta(h2::to_sampled(dense)).delta_hat;
  // insize 0.5478 against a sampled delta near 0.2296
  EXPECT_GT(tp.thinness, delta);
  EXPECT_LE(tp.thinness, 4 * delta + 1e-9);
}

TEST(Tripod, SampledChainVersion) {
  auto s = f2_ball(2);
  auto tp = tripod_points(s, s.index_of("e"), s.index_of("a^2"), s.index_of("ab"));
  EXPECT_EQ(s.id(tp.c_z), "a");
  EXPECT_EQ(tp.thinness, 0.0);
}

TEST(Project, ImaginaryAxisFoot) {
  auto axis = h2::line::from_endpoints({0, false}, h2::boundary::at_infinity());
  h2::point x{2, 1};
  auto foot = h2::project(axis, x);
  // numeric minimisation oracle along the axis
  double best_y = 1, best_d = 1e9;
  for (double y = 0.5; y < 4; y += 1e-5) {
    double d = cosh_distance(2, 1, 0, y);
    if (d < best_d) {
      best_d = d;
      best_y = y;
    }
  }
  EXPECT_NEAR(foot.x, 0.0, 1e-12);
  EXPECT_NEAR(foot.y, best_y, 1e-4);
  EXPECT_NEAR(foot.y, std::sqrt(5.0), 1e-12);
}

TEST(Project, PointOnTargetIsFixed) {
  auto axis = h2::line::from_endpoints({0, false}, h2::boundary::at_infinity());
  auto foot = h2::project(axis, h2::point{0, 3});
  EXPECT_NEAR(foot.y, 3.0, 1e-12);
  ftree::free_tree t{2};
  ftree::axis_line ax{{}, {1}};
  EXPECT_EQ(ftree::project(t, ax, words::parse("a^3", 2)), words::parse("a^3", 2));
}

TEST(Project, BoundaryPointMatchesLimitOfProjections) {
  auto axis = h2::line::from_endpoints({0, false}, h2::boundary::at_infinity());
  auto foot = h2::project(axis, h2::boundary{1.0, false});
  EXPECT_NEAR(foot.x, 0.0, 1e-12);
  EXPECT_NEAR(foot.y, 1.0, 1e-12);
  // points approaching 1 along the vertical geodesic through 1
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    auto p = h2::project(axis, h2::point{1.0, eps});
    EXPECT_NEAR(p.y, 1.0, eps);
  }
  EXPECT_THROW(h2::project(axis, h2::boundary{0.0, false}), domain_error);
  EXPECT_THROW(h2::project(axis, h2::boundary::at_infinity()), domain_error);
}

TEST(Project, TreeBoundaryProjection) {
  ftree::free_tree t{2};
  ftree::axis_line ax{{}, {1}};
  auto xi = ftree::ray::make(words::parse("a^2", 2), {2});
  EXPECT_EQ(ftree::project(t, ax, xi), words::parse("a^2", 2));
  EXPECT_THROW(ftree::project(t, ax, ftree::ray::make({}, {1})), domain_error);
}

TEST(Project, ContractionOnRandomPairs) {
  h2::model m;
  auto pts = h2::sample_ball_points({0, 1}, 5.0, 120, 21);
  double delta = four_point_delta(h2::to_sampled(pts)).delta_hat;
  auto axis = h2::line::from_endpoints({-1, false}, {2, false});
  for (std::size_t k = 0; k + 1 < pts.size(); k += 2) {
    double before = m.distance(pts[k], pts[k + 1]);
    double after = m.distance(h2::project(axis, pts[k]), h2::project(axis, pts[k + 1]));
    EXPECT_LE(after, before + 12 * delta + 1e-9);
  }
}

TEST(Morse, PerturbedChainsStayClose) {
  h2::model m;
  auto pts = h2::sample_ball_points({0, 1}, 5.0, 80, 5);
  double delta = four_point_delta(h2::to_sampled(pts)).delta_hat;
  rng gen(17);
  const double nu = 0.5;
  for (int trial = 0; trial < 10; ++trial) {
    h2::point p = pts[trial], q = pts[trial + 40];
    auto seg = h2::segment(p, q);
    std::vector<h2::point> chain;
    for (double s = 0; s <= seg.length(); s += 0.25) {
      // displace perpendicular by at most nu/2 so every distance moves by at most nu
      double h = gen.uniform(-nu / 2, nu / 2);
      auto foot = seg.at_arclength(s);
      auto fw = seg.line.to_frame(foot);
      double e = std::hypot(fw.x, fw.y);
      h2::point w{e * std::tanh(h), e / std::cosh(h)};
      chain.push_back(h2::apply(seg.line.frame, w));
    }
    auto geo = seg.sample(200);
    double haus = 0;
    for (const auto& c : chain) haus = std::max(haus, distance_to_set(m, geo, c));
    for (const auto& g : geo) haus = std::max(haus, distance_to_set(m, chain, g));
    EXPECT_LE(haus, nu + 12 * delta + 1e-9);
  }
}

TEST(FellowTravel, RaysToSameBoundaryPoint) {
  h2::model m;
  auto pts = h2::sample_ball_points({0, 1}, 5.0, 80, 8);
  double delta = four_point_delta(h2::to_sampled(pts)).delta_hat;
  h2::point p{-3, 0.5}, q{4, 2};
  // align both rays at a common height above the horizontal gap
  double H = std::max({p.y, q.y, std::fabs(p.x - q.x)});
  double t1 = std::log(H / p.y), t2 = std::log(H / q.y);
  for (double t = 0; t < 20; t += 0.5) {
    h2::point g{p.x, p.y * std::exp(t + t1)}, x{q.x, q.y * std::exp(t + t2)};
    EXPECT_LE(m.distance(g, x), 8 * delta + 1e-9);
  }
}

TEST(Helly, TreeGeodesicsMeetAtMedian) {
  ftree::free_tree t{2};
  auto p1 = t.path(word{1}, word{2});
  auto p2 = t.path(word{1}, word{-2});
  auto p3 = t.path(word{2}, word{-2});
  auto h = helly_witness(t, std::vector<std::vector<word>>{p1, p2, p3}, 0.0, 0.0);
  EXPECT_EQ(h.witness, word{});
  for (double d : h.distances) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(h.bound, 0.0);
}

TEST(Helly, CommonPointFamily) {
  ftree::free_tree t{2};
  auto p1 = t.path(word{1, 1}, word{2});
  auto p2 = t.path(word{-1}, word{2, 2});
  auto h = helly_witness(t, std::vector<std::vector<word>>{p1, p2}, 0.0, 0.0);
  for (double d : h.distances) EXPECT_LE(d, h.bound);
}

TEST(Helly, OverlappingBallsInPlane) {
  h2::model m;
  auto b1 = h2::sample_ball_points({0, 1}, 1.0, 200, 1);
  auto b2 = h2::sample_ball_points({1, 1}, 1.0, 200, 2);
  b1.push_back({0.5, 1.1});
  b2.push_back({0.5, 1.1});
  auto pts = h2::sample_ball_points({0, 1}, 4.0, 80, 4);
  double delta = four_point_delta(h2::to_sampled(pts)).delta_hat;
  auto h = helly_witness(m, std::vector<std::vector<h2::point>>{b1, b2}, delta, 0.0);
  for (double d : h.distances) EXPECT_LE(d, 119 * delta);
}

TEST(Helly, DisjointPairIsPreconditionError) {
  ftree::free_tree t{2};
  auto p1 = t.path(word{1, 1}, word{1, 1, 1});
  auto p2 = t.path(word{2, 2}, word{2, 2, 2});
  EXPECT_THROW(helly_witness(t, std::vector<std::vector<word>>{p1, p2}, 0.0, 0.0), precondition_error);
}
