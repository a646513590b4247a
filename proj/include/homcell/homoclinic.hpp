#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "homcell/geometry.hpp"
#include "homcell/manifolds.hpp"

namespace homcell {

struct HomoclinicPoint {
  Vec2 location;
  double t_u = 0.0;
  double t_s = 0.0;
  int crossing_sign = 0;  // +1 / -1 for transversal crossings, 0 when tangential
  bool transversal = false;
  bool overlap = false;   // designated point of a stretch where the two curves coincide
  double sin_angle = 0.0;
};

struct HomoclinicOptions {
  double exclusion_radius = 1e-3;
  double polish_tolerance = 1e-10;
  double tangency_sin = 1e-6;
  double overlap_tolerance = 1e-6;
  // Fraction of W_u's vertices outside the exclusion disk that must lie on W_s for the
  // coincident-curve rule to apply.
  double overlap_min_fraction = 0.05;
};

// Intersections of W_u and W_s away from the saddle, polished on exact branch points and sorted
// by t_u. When the curves coincide along a stretch, that stretch contributes a single
// tangential point: the point of the stretch farthest from the saddle.
std::vector<HomoclinicPoint> find_homoclinic_points(const ManifoldBranch& wu, const ManifoldBranch& ws,
                                                    const HomoclinicOptions& options = {});

struct HomoclinicLoop {
  Vec2 p;
  HomoclinicPoint p_prime;
  std::vector<Vec2> j_u;  // p -> p'
  std::vector<Vec2> j_s;  // p' -> p
  bool simple = false;
  int reductions = 0;     // times p' was replaced by an inner crossing
};

// Arc of a branch from the saddle to parameter t (last vertex is the exact branch point at t).
std::vector<Vec2> branch_arc(const ManifoldBranch& branch, double t, std::optional<Vec2> endpoint = std::nullopt);

// Builds J_u, J_s and replaces p' by the inner crossing with smallest t_u until the arcs meet
// only at {p, p'}. Throws Error(kDegenerateLoop) when no simple loop with area > 1e-10 remains.
HomoclinicLoop build_simple_loop(const HomoclinicPoint& p_prime, const ManifoldBranch& wu, const ManifoldBranch& ws,
                                 const HomoclinicOptions& options = {});

// Builds a loop directly from two polylines sharing their endpoints (used for fixtures).
HomoclinicLoop loop_from_arcs(std::vector<Vec2> j_u, std::vector<Vec2> j_s);

enum class CellSign { kPositive, kNegative };
const char* cell_sign_name(CellSign s);
inline int rho_of(CellSign s) { return s == CellSign::kPositive ? 1 : 2; }

struct SignProbe {
  double radius = 0.0;
  std::array<bool, 4> quadrant_inside{};  // quadrants I..IV in the departing-arc chart
  std::string verdict;
};

struct HomoclinicCell {
  HomoclinicLoop loop;
  OrientedPolygon polygon;   // counterclockwise
  CellSign sign = CellSign::kPositive;
  int rho = 1;
  double area = 0.0;
  std::vector<SignProbe> probes;
  bool closure_is_d = true;  // D = V together with the loop
  std::shared_ptr<const PolygonLocator> locator;
};

// Positive when the cell occupies exactly the quadrant between the departing arcs near p,
// negative when it occupies the other three. Throws Error(kAmbiguousSign).
CellSign classify_cell_sign(const OrientedPolygon& polygon, Vec2 p, Vec2 u_dir, Vec2 s_dir, double max_radius,
                            std::vector<SignProbe>* probes = nullptr);

// u_dir / s_dir: directions in which J_u leaves p and J_s arrives at p (pointing away from p).
HomoclinicCell cell_from_loop(const HomoclinicLoop& loop, Vec2 u_dir, Vec2 s_dir);

PointLocation point_in_cell(const HomoclinicCell& cell, Vec2 x, double band = 1e-9);

}  // namespace homcell
