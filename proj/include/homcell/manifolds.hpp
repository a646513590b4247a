#pragma once

#include <string>
#include <vector>

#include "homcell/fixed_points.hpp"
#include "homcell/geometry.hpp"
#include "homcell/map_model.hpp"

namespace homcell {

enum class BranchKind { kStable, kUnstable };
enum class BranchSide { kPlus, kMinus };
enum class StopReason { kSeeded, kTargetReached, kReturnedToSaddle, kRefinementExhausted, kLeftWorkingRectangle, kStalled };

const char* branch_kind_name(BranchKind k);
const char* branch_side_name(BranchSide s);
const char* stop_reason_name(StopReason r);

// One branch of W_s or W_u as a polyline with parameters t.
//
// t in [0, 1] is the straight stub from the saddle p to q = p + delta * direction.
// For t = 1 + k + s (k integer, s in [0, 1)) the point is g^k(seed(s)), where g is f^power
// (unstable) or f^-power (stable) and seed(s) = q + (g(q) - q) (m^s - 1) / (m - 1) with m the
// expansion factor of g along the branch. For a linear saddle this gives zeta(t + 1) = g(zeta(t))
// exactly whenever t >= 1.
struct ManifoldBranch {
  SmoothPlanarMap map;
  Vec2 saddle{};
  int saddle_period = 1;
  BranchKind kind = BranchKind::kUnstable;
  BranchSide side = BranchSide::kPlus;
  Vec2 eigenvector{};  // unit, normalised with x > 0
  Vec2 direction{};    // +/- eigenvector according to side
  double eigenvalue = 0.0;  // eigenvalue of df^saddle_period along the branch
  int power = 1;       // g = f^(power) or f^(-power); power = 2 * period for twisted saddles
  bool twisted = false;
  double delta = 1e-6;
  double expansion = 2.0;
  Vec2 q{};
  Vec2 gq{};

  std::vector<Vec2> polyline{};
  std::vector<double> params{};
  StopReason stop_reason = StopReason::kSeeded;
  double arclength = 0.0;

  int g_steps() const { return kind == BranchKind::kUnstable ? power : -power; }
  double t_max() const { return params.empty() ? 0.0 : params.back(); }
};

// Fundamental segment [q, g(q)] at the saddle (17 points), preceded by the stub [p, q].
// Throws Error(kNotASaddle) or Error(kNoInverse).
ManifoldBranch seed_branch(const SmoothPlanarMap& f, const FixedPointRecord& saddle, BranchKind kind,
                           BranchSide side, double delta = 1e-6);

struct GrowthOptions {
  double target_arclength = 1.0;
  double alpha_max = 0.2;
  double h_max = 0.05;
  double h_min = 1e-9;
  double max_param_step = 1.0 / 32;
  int max_domains = 400;
  std::size_t max_vertices = 4'000'000;
};

// Grows the branch domain by domain. The result carries the stop reason; growth never throws
// for numerical reasons (a failed evaluation stops growth with kLeftWorkingRectangle or
// kRefinementExhausted and keeps what was computed).
ManifoldBranch grow_branch(ManifoldBranch branch, const GrowthOptions& options);

// Point on the branch computed from the seed by exact iteration (not interpolation).
Vec2 exact_point(const ManifoldBranch& branch, double t);

// Piecewise-linear interpolation of the polyline; throws Error(kOutOfRange).
Vec2 zeta(const ManifoldBranch& branch, double t);

// Largest turn angle between adjacent segments of the polyline.
double max_turn_angle(const ManifoldBranch& branch);

}  // namespace homcell
