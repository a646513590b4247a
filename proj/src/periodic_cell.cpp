#include "homcell/periodic_cell.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "homcell/errors.hpp"

namespace homcell {

const char* membership_name(Membership m) {
  switch (m) {
    case Membership::kIn: return "in";
    case Membership::kOut: return "out";
    case Membership::kUncertain: return "uncertain";
  }
  return "?";
}

Membership vn_membership(const VnRegion& region, Vec2 x) {
  if (!region.cell) throw Error(ErrorCode::kInvalidArgument, "V_n region without a cell");
  bool uncertain = false;
  Vec2 y = x;
  for (int i = 0; i < region.n; ++i) {
    if (i > 0) {
      try {
        y = region.map.eval(y);
      } catch (const Error&) {
        return Membership::kUncertain;
      }
      if (!std::isfinite(y.x) || !std::isfinite(y.y)) return Membership::kUncertain;
    }
    switch (point_in_cell(*region.cell, y, region.band)) {
      case PointLocation::kOutside: return Membership::kOut;
      case PointLocation::kBoundary: uncertain = true; break;
      case PointLocation::kInside: break;
    }
  }
  return uncertain ? Membership::kUncertain : Membership::kIn;
}

namespace {

Rect cell_box(const HomoclinicCell& cell) {
  Rect b = bounding_box(cell.polygon.vertices());
  const double pad = 1e-6 * std::max({1.0, b.width(), b.height()});
  return {b.xmin - pad, b.xmax + pad, b.ymin - pad, b.ymax + pad};
}

struct Collected {
  std::vector<FixedPointRecord> in_vn;     // every orbit point strictly in V_n
  std::vector<FixedPointRecord> in_v_only; // fixed points of f^n in V that leave V
  std::size_t uncertain = 0;
  std::vector<std::string> notes;
  SearchDiagnostics diag;
};

// One sweep seeded over V (a superset of V_n); each orbit is then sorted by V_n membership.
Collected collect(const SmoothPlanarMap& f, const std::shared_ptr<const HomoclinicCell>& cell, int n,
                  const BlockOptions& o) {
  if (o.grid < 20) throw Error(ErrorCode::kInvalidArgument, "seeding grid must be >= 20");
  Collected c;
  const HomoclinicCell& V = *cell;
  auto in_v = [&](Vec2 x) { return point_in_cell(V, x, 0.0) == PointLocation::kInside; };
  const auto records = find_periodic_points(f, n, cell_box(V), o.grid, o.search, &c.diag, in_v);
  VnRegion region{f, cell, n, o.band, o.grid};
  const double saddle_gap = 1e-6;
  for (const auto& rec : records) {
    bool near_saddle = false;
    for (const Vec2& q : rec.orbit) near_saddle = near_saddle || distance(q, V.loop.p) < saddle_gap;
    if (near_saddle) continue;
    bool all_in = true, any_uncertain = false, any_in_v = false;
    for (const Vec2& q : rec.orbit) {
      const Membership m = vn_membership(region, q);
      if (m != Membership::kIn) all_in = false;
      if (m == Membership::kUncertain) any_uncertain = true;
      if (point_in_cell(V, q, o.band) != PointLocation::kOutside) any_in_v = true;
    }
    if (all_in) {
      c.in_vn.push_back(rec);
    } else if (any_uncertain) {
      ++c.uncertain;
      std::ostringstream s;
      s << "orbit through (" << rec.location.x << ", " << rec.location.y << ") lies in the boundary band";
      c.notes.push_back(s.str());
    } else if (any_in_v) {
      c.in_v_only.push_back(rec);
    }
  }
  return c;
}

}  // namespace

BlockReport find_block(const SmoothPlanarMap& f, std::shared_ptr<const HomoclinicCell> cell, int n,
                       const BlockOptions& o) {
  if (!cell) throw Error(ErrorCode::kInvalidArgument, "find_block needs a homoclinic cell");
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "period must be >= 1");
  BlockReport rep;
  rep.n = n;
  rep.rho = cell->rho;
  rep.grid = o.grid;
  Collected c = collect(f, cell, n, o);
  rep.orbits = c.in_vn;
  rep.newton_runs = c.diag.newton_runs;
  rep.max_residual = c.diag.max_residual;
  rep.uncertain_count = c.uncertain;
  rep.diagnostics = c.notes;
  if (c.uncertain > 0) rep.certifiable = false;

  int sum = 0;
  for (const auto& orbit : rep.orbits) {
    for (const Vec2& q : orbit.orbit) {
      rep.points.push_back(q);
      try {
        const int ind = index_at_point(f, n, q, o.index);
        rep.per_point_indices.push_back(ind);
        sum += ind;
      } catch (const Error& e) {
        rep.certifiable = false;
        rep.per_point_indices.push_back(0);
        rep.diagnostics.push_back(std::string(error_code_name(e.code())) + ": " + e.what());
      }
    }
  }
  if (rep.certifiable) rep.block_index = sum;

  // Independent oracle: degree of f^n along the eroded cell boundary. It counts every fixed
  // point of f^n inside the eroded polygon, so it applies only when those are exactly V_n's.
  if (!c.in_v_only.empty()) {
    rep.cross_check = "not_applicable";
    rep.diagnostics.push_back("f^n has fixed points in V outside V_n; boundary winding not comparable");
  } else {
    bool clear = true;
    for (const Vec2& q : rep.points) {
      if (cell->locator && cell->locator->distance_to_boundary(q, 2 * o.erosion) <= 2 * o.erosion) clear = false;
    }
    const auto eroded = clear ? offset_ring(cell->polygon.vertices(), o.erosion) : std::nullopt;
    if (!clear) {
      rep.cross_check = "not_applicable";
      rep.diagnostics.push_back("a fixed point lies within the erosion strip");
    } else if (!eroded) {
      rep.cross_check = "not_applicable";
      rep.diagnostics.push_back("eroded polygon is not simple");
    } else {
      try {
        const WindingResult w =
            index_along_curve(f, n, OrientedPolygon::trusted(*eroded, Orientation::kCounterclockwise), o.index.winding);
        if (w.certified) {
          rep.boundary_winding = w.degree;
          rep.cross_check = rep.block_index ? (*rep.block_index == w.degree ? "agree" : "disagree") : "not_applicable";
        } else {
          rep.cross_check = "failed";
          rep.diagnostics.push_back("boundary winding not certified");
        }
      } catch (const Error& e) {
        rep.cross_check = "failed";
        rep.diagnostics.push_back(std::string("boundary winding: ") + e.what());
      }
    }
  }
  if (rep.cross_check == "disagree") rep.diagnostics.push_back("per-point sum and boundary winding disagree");

  rep.match = rep.block_index && *rep.block_index == rep.rho && rep.cross_check != "disagree";
  if (!rep.certifiable) rep.verdict = "non_certifiable";
  else rep.verdict = rep.match ? "match" : "mismatch";
  return rep;
}

std::vector<BlockReport> verify_theorem_A(const SmoothPlanarMap& f, std::shared_ptr<const HomoclinicCell> cell,
                                          int n_max, const BlockOptions& options) {
  if (n_max < 1 || n_max > 16) throw Error(ErrorCode::kInvalidArgument, "n_max must lie in 1..16");
  std::vector<BlockReport> out;
  for (int n = 1; n <= n_max; ++n) out.push_back(find_block(f, cell, n, options));
  return out;
}

TheoremA1Report verify_theorem_A1(const SmoothPlanarMap& f, std::shared_ptr<const HomoclinicCell> cell, int r,
                                  const BlockOptions& options) {
  if (!cell) throw Error(ErrorCode::kInvalidArgument, "verify_theorem_A1 needs a homoclinic cell");
  if (r < 0 || r > 3) throw Error(ErrorCode::kInvalidArgument, "r must lie in 0..3");
  TheoremA1Report rep;
  rep.r = r;
  bool b_all = true;
  for (int k = 0; k <= r; ++k) {
    A1Level lv;
    lv.k = k;
    lv.period = 1 << k;
    const Collected c = collect(f, cell, lv.period, options);
    lv.uncertain_count = c.uncertain;
    if (c.uncertain > 0) rep.search_complete = false;
    for (const auto& rec : c.in_vn) {
      if (rec.minimal_period != lv.period) continue;
      lv.orbits.push_back(rec);
      if (rec.cls == FixedPointClass::kSink || rec.cls == FixedPointClass::kSource) lv.attracting_or_repelling = true;
      if (rec.cls == FixedPointClass::kTwistedSaddle) lv.twisted_saddle = true;
      if (!is_hyperbolic(rec.cls) || rec.borderline) ++lv.non_hyperbolic;
    }
    if (lv.non_hyperbolic > 0) rep.hypothesis_holds = false;
    if (lv.attracting_or_repelling && !rep.alternative_a_k) rep.alternative_a_k = k;
    if (!lv.twisted_saddle) b_all = false;
    rep.levels.push_back(std::move(lv));
  }
  rep.alternative_b = b_all;
  if (!rep.hypothesis_holds) rep.verdict = "hypothesis_void";
  else if (rep.alternative_a_k) rep.verdict = "alternative_a";
  else if (rep.alternative_b) rep.verdict = "alternative_b";
  else rep.verdict = "not_confirmed";
  return rep;
}

}  // namespace homcell
