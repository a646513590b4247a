#pragma once
// Shared fixtures and independent oracles for the unit tests.

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

#include "homcell/fixed_points.hpp"
#include "homcell/homoclinic.hpp"
#include "homcell/manifolds.hpp"
#include "homcell/map_model.hpp"

namespace fixtures {

using namespace homcell;

inline SmoothPlanarMap linear(double a11, double a12, double a21, double a22) {
  return builtin_map("linear", {{"a11", a11}, {"a12", a12}, {"a21", a21}, {"a22", a22}});
}

inline SmoothPlanarMap rotation(double theta, double scale = 1.0) {
  return linear(scale * std::cos(theta), -scale * std::sin(theta), scale * std::sin(theta), scale * std::cos(theta));
}

// Duffing energy; zero on the separatrix.
inline double duffing_energy(Vec2 p) { return p.y * p.y / 2 - p.x * p.x / 2 + p.x * p.x * p.x * p.x / 4; }

// Winding number of v along a circle from N uniform samples, summing wrapped angle increments.
// Independent of the library's adaptive algorithm.
template <class V>
int dense_winding(V v, Vec2 center, double radius, int samples = 1'000'000) {
  double total = 0.0;
  auto angle_at = [&](int i) {
    const double t = 2.0 * std::numbers::pi * i / samples;
    const Vec2 d = v(Vec2{center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
    return std::atan2(d.y, d.x);
  };
  double prev = angle_at(0);
  for (int i = 1; i <= samples; ++i) {
    const double a = angle_at(i % samples);
    double d = a - prev;
    while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
    while (d < -std::numbers::pi) d += 2 * std::numbers::pi;
    total += d;
    prev = a;
  }
  return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

struct DuffingLobe {
  SmoothPlanarMap f;
  FixedPointRecord saddle;
  ManifoldBranch wu, ws;
  HomoclinicLoop loop;
  std::shared_ptr<const HomoclinicCell> cell;
};

// Right lobe of the Duffing separatrix, computed once per test binary.
inline const DuffingLobe& duffing_lobe() {
  static const DuffingLobe lobe = [] {
    const auto f = builtin_map("duffing_time1");
    const auto saddle = make_record(f, 1, {0.0, 0.0});
    GrowthOptions g;
    g.target_arclength = 6.0;
    g.h_max = 2e-4;
    auto wu = grow_branch(seed_branch(f, saddle, BranchKind::kUnstable, BranchSide::kPlus), g);
    auto ws = grow_branch(seed_branch(f, saddle, BranchKind::kStable, BranchSide::kPlus), g);
    const auto pts = find_homoclinic_points(wu, ws);
    auto loop = build_simple_loop(pts.at(0), wu, ws);
    auto cell = std::make_shared<const HomoclinicCell>(cell_from_loop(loop, wu.direction, ws.direction));
    return DuffingLobe{f, saddle, std::move(wu), std::move(ws), std::move(loop), std::move(cell)};
  }();
  return lobe;
}

struct HenonTangle {
  SmoothPlanarMap f;
  FixedPointRecord saddle;
  ManifoldBranch wu, ws;
  std::vector<HomoclinicPoint> points;
  std::shared_ptr<const HomoclinicCell> cell;
};

inline const HenonTangle& henon_tangle() {
  static const HenonTangle tangle = [] {
    const auto f = builtin_map("area_preserving_henon", {{"alpha", 10.0}});
    FixedPointRecord saddle;
    for (const auto& r : find_periodic_points(f, 1, Rect{-1.5, 1.5, -1.5, 1.5}, 100))
      if (r.cls == FixedPointClass::kDirectSaddle) saddle = r;
    GrowthOptions g;
    g.target_arclength = 8.0;
    g.h_max = 1e-3;
    auto wu = grow_branch(seed_branch(f, saddle, BranchKind::kUnstable, BranchSide::kPlus), g);
    auto ws = grow_branch(seed_branch(f, saddle, BranchKind::kStable, BranchSide::kPlus), g);
    auto points = find_homoclinic_points(wu, ws);
    const HomoclinicLoop loop = build_simple_loop(points.at(0), wu, ws);
    auto cell = std::make_shared<const HomoclinicCell>(cell_from_loop(loop, wu.direction, ws.direction));
    return HenonTangle{f, saddle, std::move(wu), std::move(ws), std::move(points), std::move(cell)};
  }();
  return tangle;
}

}  // namespace fixtures
