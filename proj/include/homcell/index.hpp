#pragma once

#include <functional>

#include "homcell/geometry.hpp"
#include "homcell/map_model.hpp"

namespace homcell {

struct WindingResult {
  int degree = 0;
  double min_displacement = 0.0;
  std::size_t segments = 0;
  bool certified = false;
  double total_angle = 0.0;
};

struct WindingOptions {
  double fixed_point_floor = 1e-9;        // FixedPointOnCurve below this displacement
  std::size_t max_segments = std::size_t{1} << 20;
};

using DisplacementFn = std::function<Vec2(Vec2)>;

// Degree of v / |v| along the closed curve, by adaptive bisection of every edge until each
// refined piece turns the displacement by less than pi/4 at its midpoint and pi/2 end to end.
// The degree refers to the enclosed region: the traversal winding of a clockwise curve is negated.
WindingResult winding_of_displacement(const DisplacementFn& v, const OrientedPolygon& curve,
                                      const WindingOptions& options = {});

// v(x) = x - f^n(x).
DisplacementFn displacement_of(const SmoothPlanarMap& f, int n);

WindingResult index_along_curve(const SmoothPlanarMap& f, int n, const OrientedPolygon& curve,
                                const WindingOptions& options = {});

struct PointIndexOptions {
  double initial_radius = 1e-3;
  double min_radius = 1e-8;
  int circle_vertices = 64;
  WindingOptions winding;
};

// Index of the isolated fixed point p of f^n: the common degree on three consecutive circles
// r, r/2, r/4, shrinking r until they agree. Throws Error(kNotIsolated) otherwise.
int index_at_point(const SmoothPlanarMap& f, int n, Vec2 p, const PointIndexOptions& options = {});
int index_at_point(const DisplacementFn& v, Vec2 p, const PointIndexOptions& options = {});

// Index of f^n over the region bounded by `region` (the degree along its boundary).
int index_of_block(const SmoothPlanarMap& f, int n, const OrientedPolygon& region,
                   const WindingOptions& options = {});

}  // namespace homcell
