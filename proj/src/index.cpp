#include "homcell/index.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "homcell/errors.hpp"
#include "homcell/parallel.hpp"

namespace homcell {
namespace {

struct EdgeResult {
  double angle = 0.0;
  double min_disp = std::numeric_limits<double>::infinity();
  std::size_t pieces = 0;
};

struct Sample {
  double s;
  Vec2 x;
  Vec2 v;
};

[[noreturn]] void fixed_point_on_curve(Vec2 x, double d) {
  std::ostringstream msg;
  msg << "fixed point on curve near (" << x.x << ", " << x.y << "), displacement " << d;
  throw Error(ErrorCode::kFixedPointOnCurve, msg.str());
}

Vec2 checked(const DisplacementFn& v, Vec2 x, const WindingOptions& opt, double& min_disp) {
  const Vec2 d = v(x);
  const double n = norm(d);
  if (!std::isfinite(n)) throw Error(ErrorCode::kDomain, "non-finite displacement on curve");
  min_disp = std::min(min_disp, n);
  if (n < opt.fixed_point_floor) fixed_point_on_curve(x, n);
  return d;
}

EdgeResult refine_edge(const DisplacementFn& v, Vec2 a, Vec2 va, Vec2 b, Vec2 vb, const WindingOptions& opt,
                       const std::atomic<std::size_t>& budget_used) {
  EdgeResult out;
  // Explicit stack of pending pieces, processed left to right so the sum order is fixed.
  std::vector<std::pair<Sample, Sample>> stack{{{0.0, a, va}, {1.0, b, vb}}};
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    const double sm = 0.5 * (lo.s + hi.s);
    const Vec2 xm = a + sm * (b - a);
    const Vec2 vm = checked(v, xm, opt, out.min_disp);
    const double t1 = turn_angle(lo.v, vm);
    const double t2 = turn_angle(vm, hi.v);
    if (std::abs(t1) < kPi / 4 && std::abs(t2) < kPi / 4) {
      out.angle += t1 + t2;
      out.pieces += 2;
      continue;
    }
    if (hi.s - lo.s < 1e-15 || out.pieces + stack.size() + budget_used.load(std::memory_order_relaxed) > opt.max_segments) {
      throw Error(ErrorCode::kRefinementExhausted, "winding refinement exceeded its segment budget");
    }
    stack.push_back({{sm, xm, vm}, hi});
    stack.push_back({lo, {sm, xm, vm}});
  }
  return out;
}

}  // namespace

WindingResult winding_of_displacement(const DisplacementFn& v, const OrientedPolygon& curve,
                                      const WindingOptions& options) {
  const auto& pts = curve.vertices();
  const std::size_t n = pts.size();
  std::vector<Vec2> vv(n);
  std::vector<double> vmin(n, std::numeric_limits<double>::infinity());
  std::vector<EdgeResult> edges(n);
  std::atomic<std::size_t> used{0};
  auto vertex_pass = [&](std::size_t i) { vv[i] = checked(v, pts[i], options, vmin[i]); };
  auto edge_pass = [&](std::size_t i) {
    edges[i] = refine_edge(v, pts[i], vv[i], pts[(i + 1) % n], vv[(i + 1) % n], options, used);
    used.fetch_add(edges[i].pieces, std::memory_order_relaxed);
  };
  if (n >= 128) {
    parallel_for(n, vertex_pass);
    parallel_for(n, edge_pass);
  } else {
    for (std::size_t i = 0; i < n; ++i) vertex_pass(i);
    for (std::size_t i = 0; i < n; ++i) edge_pass(i);
  }
  WindingResult res;
  res.min_displacement = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    res.total_angle += edges[i].angle;
    res.segments += edges[i].pieces;
    res.min_displacement = std::min({res.min_displacement, vmin[i], edges[i].min_disp});
  }
  if (res.segments > options.max_segments)
    throw Error(ErrorCode::kRefinementExhausted, "winding refinement exceeded its segment budget");
  const double turns = res.total_angle / (2 * kPi);
  res.degree = static_cast<int>(std::lround(turns));
  if (curve.orientation() == Orientation::kClockwise) {
    res.degree = -res.degree;
    res.total_angle = -res.total_angle;
  }
  res.certified = res.min_displacement > 10 * options.fixed_point_floor && std::abs(turns - std::round(turns)) < 1e-6;
  return res;
}

DisplacementFn displacement_of(const SmoothPlanarMap& f, int n) {
  return [f, n](Vec2 x) { return x - f.iterate(x, n); };
}

WindingResult index_along_curve(const SmoothPlanarMap& f, int n, const OrientedPolygon& curve,
                                const WindingOptions& options) {
  return winding_of_displacement(displacement_of(f, n), curve, options);
}

int index_at_point(const DisplacementFn& v, Vec2 p, const PointIndexOptions& options) {
  std::vector<std::optional<int>> degrees;
  std::ostringstream trail;
  for (double r = options.initial_radius; r >= options.min_radius * (1 - 1e-12); r *= 0.5) {
    std::optional<int> d;
    try {
      const WindingResult w = winding_of_displacement(v, circle_polygon(p, r, options.circle_vertices), options.winding);
      if (w.certified) d = w.degree;
      trail << " r=" << r << ":" << (w.certified ? std::to_string(w.degree) : "uncertified");
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kFixedPointOnCurve && e.code() != ErrorCode::kRefinementExhausted) throw;
      trail << " r=" << r << ":" << error_code_name(e.code());
    }
    degrees.push_back(d);
    const std::size_t k = degrees.size();
    if (k >= 3 && degrees[k - 1] && degrees[k - 2] && degrees[k - 3] && *degrees[k - 1] == *degrees[k - 2] &&
        *degrees[k - 2] == *degrees[k - 3])
      return *degrees[k - 1];
  }
  std::ostringstream msg;
  msg << "fixed point at (" << p.x << ", " << p.y << ") not isolated at any probed scale;" << trail.str();
  throw Error(ErrorCode::kNotIsolated, msg.str());
}

int index_at_point(const SmoothPlanarMap& f, int n, Vec2 p, const PointIndexOptions& options) {
  return index_at_point(displacement_of(f, n), p, options);
}

int index_of_block(const SmoothPlanarMap& f, int n, const OrientedPolygon& region, const WindingOptions& options) {
  return index_along_curve(f, n, region, options).degree;
}

}  // namespace homcell
