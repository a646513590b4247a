#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "homcell/periodic_cell.hpp"

using namespace homcell;

namespace {

BlockOptions quick() {
  BlockOptions o;
  o.grid = 120;
  return o;
}

}  // namespace

TEST_CASE("V_{n+1} is contained in V_n on random samples") {
  const auto& d = fixtures::duffing_lobe();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0.0, 1.5), uy(-0.8, 0.8);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const Vec2 x{ux(rng), uy(rng)};
    for (int n = 1; n < 4; ++n) {
      const auto next = vn_membership(VnRegion{d.f, d.cell, n + 1}, x);
      if (next != Membership::kIn) continue;
      ++checked;
      CHECK(vn_membership(VnRegion{d.f, d.cell, n}, x) == Membership::kIn);
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("duffing lobe is invariant: V_n membership does not depend on n") {
  const auto& d = fixtures::duffing_lobe();
  for (Vec2 x : {Vec2{1.0, 0.0}, Vec2{0.7, 0.3}, Vec2{1.3, -0.2}}) {
    CHECK(vn_membership(VnRegion{d.f, d.cell, 1}, x) == Membership::kIn);
    CHECK(vn_membership(VnRegion{d.f, d.cell, 5}, x) == Membership::kIn);
  }
  CHECK(vn_membership(VnRegion{d.f, d.cell, 1}, {-1.0, 0.0}) == Membership::kOut);
}

TEST_CASE("duffing lobe: block index 1 = rho for n = 1..4") {
  const auto& d = fixtures::duffing_lobe();
  const auto reports = verify_theorem_A(d.f, d.cell, 4, quick());
  REQUIRE(reports.size() == 4);
  for (const auto& b : reports) {
    INFO("n = " << b.n);
    REQUIRE(b.block_index);
    CHECK(*b.block_index == 1);
    CHECK(b.verdict == "match");
    CHECK(b.cross_check == "agree");
    REQUIRE(b.points.size() == 1);
    // the only equilibrium inside the lobe
    CHECK(distance(b.points[0], {1.0, 0.0}) < 1e-8);
  }
}

TEST_CASE("the saddle is never part of a block") {
  const auto& h = fixtures::henon_tangle();
  const auto b = find_block(h.f, h.cell, 2, quick());
  for (const Vec2& p : b.points) CHECK(distance(p, h.saddle.location) > 1e-6);
  CHECK(b.block_index);
}

TEST_CASE("henon tangle: per-point sum and eroded winding agree with rho") {
  const auto& h = fixtures::henon_tangle();
  for (int n = 1; n <= 2; ++n) {
    const auto b = find_block(h.f, h.cell, n, quick());
    INFO("n = " << n);
    CHECK(b.verdict != "mismatch");
    if (b.verdict == "match") {
      CHECK(*b.block_index == h.cell->rho);
      if (b.boundary_winding) CHECK(*b.boundary_winding == *b.block_index);
    }
  }
}

TEST_CASE("theorem A1 on the duffing lobe: no hyperbolic hypothesis") {
  const auto& d = fixtures::duffing_lobe();
  const auto r = verify_theorem_A1(d.f, d.cell, 1, quick());
  CHECK_FALSE(r.hypothesis_holds);
  CHECK(r.verdict == "hypothesis_void");
}

TEST_CASE("theorem A1 with an attracting center") {
  const auto f = builtin_map("dissipative_duffing_time1");
  const auto s = make_record(f, 1, {0, 0});
  GrowthOptions g;
  g.target_arclength = 6.0;
  g.h_max = 2e-4;
  const auto wu = grow_branch(seed_branch(f, s, BranchKind::kUnstable, BranchSide::kPlus), g);
  const auto ws = grow_branch(seed_branch(f, s, BranchKind::kStable, BranchSide::kPlus), g);
  const auto pts = find_homoclinic_points(wu, ws);
  REQUIRE(!pts.empty());
  const auto cell = std::make_shared<const HomoclinicCell>(
      cell_from_loop(build_simple_loop(pts[0], wu, ws), wu.direction, ws.direction));
  const auto r = verify_theorem_A1(f, cell, 1, quick());
  CHECK(r.verdict == "alternative_a");
  REQUIRE(r.alternative_a_k);
  CHECK(*r.alternative_a_k == 0);
}

TEST_CASE("argument validation") {
  const auto& d = fixtures::duffing_lobe();
  CHECK_THROWS_AS(verify_theorem_A(d.f, d.cell, 17), Error);
  CHECK_THROWS_AS(verify_theorem_A1(d.f, d.cell, 4), Error);
  BlockOptions tiny;
  tiny.grid = 5;
  CHECK_THROWS_AS(find_block(d.f, d.cell, 1, tiny), Error);
}
