#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "homcell/fixed_points.hpp"
#include "homcell/homoclinic.hpp"
#include "homcell/index.hpp"
#include "homcell/map_model.hpp"

namespace homcell {

enum class Membership { kIn, kOut, kUncertain };
const char* membership_name(Membership m);

// V_n = { x in V : f^i(x) in V for i = 1..n-1 }.
struct VnRegion {
  SmoothPlanarMap map;
  std::shared_ptr<const HomoclinicCell> cell;
  int n = 1;
  double band = 1e-9;  // boundary band of the cell polygon
  int sample_grid = 200;
};

// Stops at the first iterate that is definitely outside; uncertain when an iterate lands in
// the boundary band or cannot be evaluated.
Membership vn_membership(const VnRegion& region, Vec2 x);

struct BlockOptions {
  int grid = 200;
  double band = 1e-9;
  double erosion = 1e-4;  // offset of the eroded polygon used by the winding cross-check
  FixedPointSearchOptions search = [] {
    FixedPointSearchOptions s;
    s.shooting_seeds = true;
    return s;
  }();
  PointIndexOptions index;
};

struct BlockReport {
  int n = 1;
  std::vector<FixedPointRecord> orbits;  // orbits of f^n lying in V_n
  std::vector<Vec2> points;              // every fixed point of f^n in V_n (orbit points expanded)
  std::vector<int> per_point_indices;
  std::optional<int> block_index;
  int rho = 1;
  bool certifiable = true;
  bool match = false;
  std::string verdict;  // match, mismatch, non_certifiable

  // Eroded-boundary winding of f^n; set when the cross-check applies.
  std::optional<int> boundary_winding;
  std::string cross_check;  // agree, disagree, not_applicable, failed

  int grid = 0;
  std::size_t newton_runs = 0;
  double max_residual = 0.0;
  std::size_t uncertain_count = 0;
  std::vector<std::string> diagnostics;
};

// Fixed points of f^n in V_n with their indices and block sum, compared with the cell's rho.
// Index failures mark the report non-certifiable instead of throwing.
BlockReport find_block(const SmoothPlanarMap& f, std::shared_ptr<const HomoclinicCell> cell, int n,
                       const BlockOptions& options = {});

// find_block for n = 1..n_max (n_max <= 16).
std::vector<BlockReport> verify_theorem_A(const SmoothPlanarMap& f, std::shared_ptr<const HomoclinicCell> cell,
                                          int n_max, const BlockOptions& options = {});

struct A1Level {
  int k = 0;
  int period = 1;  // 2^k
  std::vector<FixedPointRecord> orbits;  // orbits of cardinality 2^k in V
  bool attracting_or_repelling = false;
  bool twisted_saddle = false;
  int non_hyperbolic = 0;
  std::size_t uncertain_count = 0;
};

struct TheoremA1Report {
  int r = 0;
  std::vector<A1Level> levels;
  bool hypothesis_holds = true;  // every 2^k-orbit found is hyperbolic
  std::optional<int> alternative_a_k;  // smallest k with an attracting or repelling orbit
  bool alternative_b = false;          // twisted saddle orbit at every k
  std::string verdict;  // hypothesis_void, alternative_a, alternative_b, not_confirmed
  bool search_complete = true;  // false when some orbit point was uncertain
};

// Classifies the 2^k-orbits in the cell for k = 0..r (r <= 3).
TheoremA1Report verify_theorem_A1(const SmoothPlanarMap& f, std::shared_ptr<const HomoclinicCell> cell, int r,
                                  const BlockOptions& options = {});

}  // namespace homcell
