#pragma once

#include <optional>
#include <string>
#include <vector>

#include "homcell/fixed_points.hpp"
#include "homcell/homoclinic.hpp"
#include "homcell/index.hpp"
#include "homcell/map_model.hpp"

namespace homcell {

// Sphere map given by two charts related by the complex inversion w = 1/z.
struct SphereMap {
  SmoothPlanarMap north;
  SmoothPlanarMap south;
  double r_in = 0.5;   // overlap annulus r_in <= |z| <= r_out
  double r_out = 2.0;
  double tolerance = 1e-8;
};

// w = 1/z = (x, -y) / (x^2 + y^2); an involution.
Vec2 chart_transition(Vec2 z);

struct ChartCheck {
  bool ok = false;
  double max_error = 0.0;
  int samples = 0;
  std::string detail;
};

// Compares 1/N(z) with S(1/z) on the overlap annulus.
ChartCheck check_chart_consistency(const SphereMap& g, int radii = 8, int angles = 64);
// Throws Error(kChartInconsistency) when the check fails; also validates the radii.
void require_chart_consistency(const SphereMap& g);

struct SphereFixedPoint {
  Vec2 location;               // chart coordinates
  bool south_chart = false;
  FixedPointClass cls = FixedPointClass::kNonsimple;
  int index = 0;
  std::optional<int> other_chart_index;  // when the point also lies in the overlap annulus
};

struct SphereSearchOptions {
  int grid = 200;
  FixedPointSearchOptions search;
  PointIndexOptions index;
};

struct TotalIndexReport {
  std::vector<SphereFixedPoint> points;
  int total = 0;            // sum of point indices
  int circle_degree = 0;    // degree along |z| = R in the north chart plus |w| = 1/R in the south chart
  double split_radius = 1.0;
  bool charts_agree = true; // indices of annulus points agree in both charts
  std::vector<std::string> diagnostics;
};

// Fixed points with |z| < R from the north chart and |w| < 1/R from the south chart,
// R = sqrt(r_in r_out). Throws Error(kNotIsolated) / Error(kChartInconsistency).
TotalIndexReport total_index(const SphereMap& g, const SphereSearchOptions& options = {});

struct ComponentIndexReport {
  int cell_index = 0;    // component bounded by the loop in the north chart
  int outer_index = 0;   // component containing the point at infinity
  int saddle_index = 0;
  std::string outer_method;  // opposite_chart or radius_split
  bool is_one_two = false;   // {cell_index, outer_index} == {1, 2}
  bool sums_to_two = false;  // cell + outer + saddle == 2
};

// Indices of g on the two complementary components of the cell's loop, each by winding along
// an offset of the loop. Throws Error(kDegenerateLoop) when the offsets cannot be built.
ComponentIndexReport component_indices(const SphereMap& g, const HomoclinicCell& cell, double offset = 1e-4,
                                       const WindingOptions& winding = {});

struct IndexedFixedPoint {
  Vec2 location;
  bool south_chart = false;
  int index = 0;
};

struct LefschetzReport {
  int fixed_points = 0;
  int lefschetz = 0;
  int rho = 1;
  int bound = 0;       // |Lef + 1 - rho| + 1 + rho
  int weak_bound = 0;  // |Lef| + 2
  bool satisfied = false;
  bool weak_satisfied = false;
  int in_closure = 0;  // fixed points in the closed cell (at least 1 + rho)
  int outside = 0;     // fixed points off the closed cell (at least |Lef + 1 - rho|)
  std::string diagnostic;
};

// Lefschetz number taken as the index sum over `points`. Throws Error(kHypothesisUnmet) when
// an index lies outside {-1, 0, 1}.
LefschetzReport lefschetz_bound_check(const std::vector<IndexedFixedPoint>& points, const HomoclinicCell& cell);

std::vector<IndexedFixedPoint> indexed_points(const TotalIndexReport& report);

struct PerturbationRun {
  double epsilon = 0.0;
  double angle = 0.0;
  int fixed_points = 0;
};

struct ThreeFixedPointReport {
  std::vector<PerturbationRun> runs;
  int min_count = 0;
  bool satisfied = false;
};

// Counts fixed points of g plus a small constant push in the north chart (cut off smoothly
// before r_out, so the south chart is unchanged) for several directions.
ThreeFixedPointReport three_fixed_points_check(const SphereMap& g, double epsilon = 1e-3, int directions = 4,
                                               const SphereSearchOptions& options = {});

}  // namespace homcell
