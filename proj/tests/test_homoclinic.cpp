#include "doctest.h"
#include "fixtures.hpp"

using namespace homcell;

TEST_CASE("duffing lobe: coincident curves give p' near (sqrt 2, 0)") {
  const auto& d = fixtures::duffing_lobe();
  const auto& pp = d.loop.p_prime;
  CHECK(pp.overlap);
  CHECK_FALSE(pp.transversal);
  // the overlap maximiser is only accurate to about the fourth root of the curve tolerance
  CHECK(distance(pp.location, {std::sqrt(2.0), 0.0}) < 1e-4);
  CHECK(d.loop.simple);
}

TEST_CASE("duffing lobe is a positive cell of area 4/3 around (1, 0)") {
  const auto& c = *fixtures::duffing_lobe().cell;
  CHECK(c.sign == CellSign::kPositive);
  CHECK(c.rho == 1);
  // area = 2 * integral_0^sqrt2 x sqrt(1 - x^2 / 2) dx = 4/3
  CHECK(c.area == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(c.polygon.orientation() == Orientation::kCounterclockwise);
  CHECK(point_in_cell(c, {1, 0}) == PointLocation::kInside);
  CHECK(point_in_cell(c, {-1, 0}) == PointLocation::kOutside);
  CHECK(point_in_cell(c, {0.5, 0.7}) == PointLocation::kOutside);
}

TEST_CASE("henon tangle has transversal crossings polished on the branches") {
  const auto& h = fixtures::henon_tangle();
  REQUIRE(!h.points.empty());
  for (std::size_t i = 0; i < h.points.size(); ++i) {
    const auto& p = h.points[i];
    CHECK(p.transversal);
    CHECK(std::abs(p.crossing_sign) == 1);
    CHECK(distance(exact_point(h.wu, p.t_u), p.location) < 1e-8);
    CHECK(distance(exact_point(h.ws, p.t_s), p.location) < 1e-8);
    if (i > 0) CHECK(p.t_u > h.points[i - 1].t_u);
  }
  CHECK(h.cell->rho >= 1);
  CHECK(h.cell->rho <= 2);
}

TEST_CASE("hand-built positive and negative cells") {
  const Vec2 u{1, 0}, s{0, 1};
  SUBCASE("quadrant cell is positive") {
    const auto loop = loop_from_arcs({{0, 0}, {1, 0}, {1, 1}}, {{1, 1}, {0, 1}, {0, 0}});
    const auto c = cell_from_loop(loop, u, s);
    CHECK(c.sign == CellSign::kPositive);
    CHECK(c.rho == 1);
  }
  SUBCASE("three-quadrant cell is negative") {
    const auto loop = loop_from_arcs({{0, 0}, {1, 0}, {1, -1}, {-1, -1}, {-1, 1}}, {{-1, 1}, {0, 1}, {0, 0}});
    const auto c = cell_from_loop(loop, u, s);
    CHECK(c.sign == CellSign::kNegative);
    CHECK(c.rho == 2);
    CHECK(c.area == doctest::Approx(3.0));
  }
}

TEST_CASE("degenerate loops are refused") {
  const auto loop = loop_from_arcs({{0, 0}, {1, 0}}, {{1, 0}, {0, 0}});
  try {
    cell_from_loop(loop, {1, 0}, {0, 1});
    FAIL("expected DegenerateLoop");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateLoop);
  }
}

TEST_CASE("straight linear-saddle branches have no homoclinic point") {
  const auto f = builtin_map("linear_saddle", {{"lambda", 0.5}, {"mu", 2.0}});
  const auto s = make_record(f, 1, {0, 0});
  GrowthOptions g;
  g.target_arclength = 2.0;
  const auto wu = grow_branch(seed_branch(f, s, BranchKind::kUnstable, BranchSide::kPlus), g);
  const auto ws = grow_branch(seed_branch(f, s, BranchKind::kStable, BranchSide::kPlus), g);
  CHECK(find_homoclinic_points(wu, ws).empty());
}
