#pragma once

#include <string>
#include <vector>

#include "homcell/fixed_points.hpp"
#include "homcell/homoclinic.hpp"
#include "homcell/manifolds.hpp"
#include "homcell/periodic_cell.hpp"
#include "homcell/scenario.hpp"
#include "homcell/sphere.hpp"

namespace homcell {

Json vec_json(Vec2 v);
Json fixed_point_json(const FixedPointRecord& r);
Json branch_json(const ManifoldBranch& b);
Json homoclinic_point_json(const HomoclinicPoint& h);
Json cell_json(const HomoclinicCell& c);
Json block_json(const BlockReport& b);
Json a1_json(const TheoremA1Report& r);
Json total_index_json(const TotalIndexReport& r);
Json components_json(const ComponentIndexReport& r);
Json lefschetz_json(const LefschetzReport& r);
Json three_points_json(const ThreeFixedPointReport& r);

// "t,x,y" rows at full precision.
std::string branch_csv(const ManifoldBranch& b);

struct PortraitInput {
  Rect view;
  std::vector<const ManifoldBranch*> branches;
  const HomoclinicCell* cell = nullptr;
  std::vector<FixedPointRecord> fixed_points;
};

// Deterministic SVG: unstable branches class "wu", stable "ws", shaded cell class "cell",
// fixed points as glyphs with class set to their classification.
// Throws Error(kInvalidArgument) when there is nothing to draw.
std::string render_portrait(const PortraitInput& input);

}  // namespace homcell
