#include "homcell/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "homcell/errors.hpp"

namespace homcell {

Vec2 chart_transition(Vec2 z) {
  const double m2 = z.x * z.x + z.y * z.y;
  if (m2 == 0.0) throw Error(ErrorCode::kDomain, "chart transition at the pole");
  return {z.x / m2, -z.y / m2};
}

ChartCheck check_chart_consistency(const SphereMap& g, int radii, int angles) {
  ChartCheck c;
  if (!(g.r_in > 0.0 && g.r_out > g.r_in)) {
    c.detail = "overlap annulus needs 0 < r_in < r_out";
    return c;
  }
  for (int i = 0; i < radii; ++i) {
    const double r = radii == 1 ? g.r_in : g.r_in + (g.r_out - g.r_in) * i / (radii - 1);
    for (int j = 0; j < angles; ++j) {
      const double a = 2 * kPi * (j + 0.5 * (i % 2)) / angles;
      const Vec2 z{r * std::cos(a), r * std::sin(a)};
      try {
        const Vec2 w_from_north = chart_transition(g.north.eval(z));
        const Vec2 w_from_south = g.south.eval(chart_transition(z));
        const double err = distance(w_from_north, w_from_south) / std::max(1.0, norm(w_from_south));
        if (!(err <= c.max_error)) c.max_error = std::isfinite(err) ? err : 1e300;
      } catch (const Error& e) {
        c.max_error = 1e300;
        c.detail = std::string("chart evaluation failed: ") + e.what();
      }
      ++c.samples;
    }
  }
  c.ok = c.max_error <= g.tolerance;
  if (!c.ok && c.detail.empty()) {
    std::ostringstream s;
    s << "charts disagree on the overlap annulus by " << c.max_error << " (tolerance " << g.tolerance << ")";
    c.detail = s.str();
  }
  return c;
}

void require_chart_consistency(const SphereMap& g) {
  const ChartCheck c = check_chart_consistency(g);
  if (!c.ok) throw Error(ErrorCode::kChartInconsistency, c.detail);
}

namespace {

std::vector<FixedPointRecord> search_disk(const SmoothPlanarMap& f, double radius, const SphereSearchOptions& o) {
  const Rect box{-radius, radius, -radius, radius};
  return find_periodic_points(f, 1, box, o.grid, o.search, nullptr, [radius](Vec2 x) { return norm(x) < radius; });
}

// Adds points along each edge so that chords stay short relative to the distance to 0 and
// subtend small angles there; the ring then survives the inversion w = 1/z.
std::vector<Vec2> densify_for_inversion(const std::vector<Vec2>& ring) {
  std::vector<Vec2> out;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring[i], b = ring[(i + 1) % n];
    const double near = std::min(norm(a), norm(b));
    const double len = distance(a, b);
    const double ang = std::abs(turn_angle(a, b));
    int pieces = 1;
    if (near > 0.0) pieces = std::max(pieces, static_cast<int>(std::ceil(len / (0.1 * near))));
    pieces = std::max(pieces, static_cast<int>(std::ceil(ang / (kPi / 16))));
    pieces = std::min(pieces, 4096);
    for (int k = 0; k < pieces; ++k) out.push_back(a + (static_cast<double>(k) / pieces) * (b - a));
  }
  return out;
}

OrientedPolygon as_polygon(std::vector<Vec2> ring) {
  const double a = signed_area(ring);
  return OrientedPolygon::trusted(std::move(ring), a >= 0 ? Orientation::kCounterclockwise : Orientation::kClockwise);
}

}  // namespace

TotalIndexReport total_index(const SphereMap& g, const SphereSearchOptions& o) {
  require_chart_consistency(g);
  TotalIndexReport rep;
  const double R = std::sqrt(g.r_in * g.r_out);
  rep.split_radius = R;
  auto add = [&](const SmoothPlanarMap& f, const SmoothPlanarMap& other, bool south, double radius) {
    for (const auto& rec : search_disk(f, radius, o)) {
      if (rec.minimal_period != 1) continue;
      SphereFixedPoint p;
      p.location = rec.location;
      p.south_chart = south;
      p.cls = rec.cls;
      p.index = index_at_point(f, 1, rec.location, o.index);
      const double r = norm(rec.location);
      const double rz = south ? (r > 0 ? 1.0 / r : 1e300) : r;
      if (std::abs(rz - R) < 1e-3 * R) {
        std::ostringstream s;
        s << "fixed point near the split circle at |z| = " << rz;
        rep.diagnostics.push_back(s.str());
      }
      if (rz > g.r_in && rz < g.r_out) {
        p.other_chart_index = index_at_point(other, 1, chart_transition(rec.location), o.index);
        if (*p.other_chart_index != p.index) rep.charts_agree = false;
      }
      rep.total += p.index;
      rep.points.push_back(p);
    }
  };
  add(g.north, g.south, false, R);
  add(g.south, g.north, true, 1.0 / R);
  const WindingResult wn = index_along_curve(g.north, 1, circle_polygon({0, 0}, R, 256), o.index.winding);
  const WindingResult ws = index_along_curve(g.south, 1, circle_polygon({0, 0}, 1.0 / R, 256), o.index.winding);
  rep.circle_degree = wn.degree + ws.degree;
  if (!wn.certified || !ws.certified) rep.diagnostics.push_back("split-circle winding not certified");
  if (!rep.charts_agree) throw Error(ErrorCode::kChartInconsistency, "a fixed point has different indices in the two charts");
  return rep;
}

ComponentIndexReport component_indices(const SphereMap& g, const HomoclinicCell& cell, double offset,
                                       const WindingOptions& winding) {
  require_chart_consistency(g);
  if (!cell.loop.simple) throw Error(ErrorCode::kDegenerateLoop, "loop is not simple");
  ComponentIndexReport rep;
  const auto& ccw = cell.polygon.vertices();
  const auto inner = offset_ring(ccw, offset);
  const auto outer = offset_ring(ccw, -offset);
  if (!inner || !outer) throw Error(ErrorCode::kDegenerateLoop, "offset curves of the loop are not simple");
  const WindingResult wi =
      index_along_curve(g.north, 1, OrientedPolygon::trusted(*inner, Orientation::kCounterclockwise), winding);
  if (!wi.certified) throw Error(ErrorCode::kNotIsolated, "winding along the inner offset not certified");
  rep.cell_index = wi.degree;
  rep.saddle_index = index_at_point(g.north, 1, cell.loop.p);

  const PolygonLocator grown(*outer);
  if (grown.locate({0, 0}, 0.0) == PointLocation::kInside) {
    // The outer component contains w = 0 and is bounded by the inverted ring in the south chart.
    std::vector<Vec2> w;
    for (const Vec2& z : densify_for_inversion(*outer)) w.push_back(chart_transition(z));
    const WindingResult wo = index_along_curve(g.south, 1, as_polygon(std::move(w)), winding);
    if (!wo.certified) throw Error(ErrorCode::kNotIsolated, "winding along the inverted outer offset not certified");
    rep.outer_index = wo.degree;
    rep.outer_method = "opposite_chart";
  } else {
    // Split at |z| = R: the part inside the circle from the north chart, the rest around w = 0.
    const double R = std::sqrt(g.r_in * g.r_out);
    for (const Vec2& z : *outer) {
      if (norm(z) >= R) throw Error(ErrorCode::kDegenerateLoop, "loop is not inside the split circle");
    }
    const WindingResult big = index_along_curve(g.north, 1, circle_polygon({0, 0}, R, 256), winding);
    const WindingResult ring =
        index_along_curve(g.north, 1, OrientedPolygon::trusted(*outer, Orientation::kCounterclockwise), winding);
    const WindingResult cap = index_along_curve(g.south, 1, circle_polygon({0, 0}, 1.0 / R, 256), winding);
    if (!big.certified || !ring.certified || !cap.certified)
      throw Error(ErrorCode::kNotIsolated, "winding for the outer component not certified");
    rep.outer_index = big.degree - ring.degree + cap.degree;
    rep.outer_method = "radius_split";
  }
  rep.is_one_two = (rep.cell_index == 1 && rep.outer_index == 2) || (rep.cell_index == 2 && rep.outer_index == 1);
  rep.sums_to_two = rep.cell_index + rep.outer_index + rep.saddle_index == 2;
  return rep;
}

std::vector<IndexedFixedPoint> indexed_points(const TotalIndexReport& report) {
  std::vector<IndexedFixedPoint> out;
  for (const auto& p : report.points) out.push_back({p.location, p.south_chart, p.index});
  return out;
}

LefschetzReport lefschetz_bound_check(const std::vector<IndexedFixedPoint>& points, const HomoclinicCell& cell) {
  LefschetzReport rep;
  for (const auto& p : points) {
    if (p.index < -1 || p.index > 1) {
      std::ostringstream s;
      s << "fixed point at (" << p.location.x << ", " << p.location.y << ") has index " << p.index
        << "; the bound needs indices in {-1, 0, 1}";
      throw Error(ErrorCode::kHypothesisUnmet, s.str());
    }
    rep.lefschetz += p.index;
  }
  rep.fixed_points = static_cast<int>(points.size());
  rep.rho = cell.rho;
  rep.bound = std::abs(rep.lefschetz + 1 - rep.rho) + 1 + rep.rho;
  rep.weak_bound = std::abs(rep.lefschetz) + 2;
  rep.satisfied = rep.fixed_points >= rep.bound;
  rep.weak_satisfied = rep.fixed_points >= rep.weak_bound;
  for (const auto& p : points) {
    const bool closed = !p.south_chart && (distance(p.location, cell.loop.p) < 1e-6 ||
                                           point_in_cell(cell, p.location) != PointLocation::kOutside);
    if (closed) ++rep.in_closure;
    else ++rep.outside;
  }
  if (!rep.satisfied) rep.diagnostic = "fewer fixed points than the bound: the fixed-point search is incomplete";
  return rep;
}

ThreeFixedPointReport three_fixed_points_check(const SphereMap& g, double epsilon, int directions,
                                               const SphereSearchOptions& o) {
  require_chart_consistency(g);
  if (directions < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one direction");
  ThreeFixedPointReport rep;
  const double r0 = g.r_in, r1 = g.r_out;
  // psi = 1 for r <= r_in, smoothstep down to 0 at r_out.
  auto psi = [r0, r1](double r, double& dpsi) {
    dpsi = 0.0;
    if (r <= r0) return 1.0;
    if (r >= r1) return 0.0;
    const double s = (r - r0) / (r1 - r0);
    dpsi = -6.0 * s * (1.0 - s) / (r1 - r0);
    return 1.0 - s * s * (3.0 - 2.0 * s);
  };
  int min_count = -1;
  for (int k = 0; k < directions; ++k) {
    const double ang = 2 * kPi * k / directions;
    const Vec2 u = epsilon * Vec2{std::cos(ang), std::sin(ang)};
    const SmoothPlanarMap base = g.north;
    MapEvaluators ev;
    ev.forward = [base, u, psi](Vec2 z) {
      double d;
      return base.eval(z) + psi(norm(z), d) * u;
    };
    ev.forward_with_jacobian = [base, u, psi](Vec2 z, Mat2& j) {
      const Vec2 fz = base.eval_with_jacobian(z, j);
      const double r = norm(z);
      double d;
      const double p = psi(r, d);
      if (r > 0.0 && d != 0.0) {
        const Vec2 grad = (d / r) * z;
        j.a11 += u.x * grad.x;
        j.a12 += u.x * grad.y;
        j.a21 += u.y * grad.x;
        j.a22 += u.y * grad.y;
      }
      return fz + p * u;
    };
    const SmoothPlanarMap pert(base.kind(), base.name() + "+push", base.params(), std::move(ev), base.working_rect());
    const int count = static_cast<int>(search_disk(pert, r1, o).size() + search_disk(g.south, 1.0 / r1, o).size());
    rep.runs.push_back({epsilon, ang, count});
    min_count = min_count < 0 ? count : std::min(min_count, count);
  }
  rep.min_count = min_count;
  rep.satisfied = min_count >= 3;
  return rep;
}

}  // namespace homcell
