#include "homcell/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "homcell/errors.hpp"

namespace homcell {

Json vec_json(Vec2 v) { return Json::array({v.x, v.y}); }

Json fixed_point_json(const FixedPointRecord& r) {
  Json j;
  j["location"] = vec_json(r.location);
  j["period"] = r.period;
  j["minimal_period"] = r.minimal_period;
  Json eig = Json::array();
  for (const auto& e : r.eigenvalues) eig.push_back(Json::array({e.real(), e.imag()}));
  j["eigenvalues"] = eig;
  j["classification"] = class_name(r.cls);
  j["borderline"] = r.borderline;
  j["index"] = r.index ? Json(*r.index) : Json(nullptr);
  j["residual"] = r.residual;
  Json orbit = Json::array();
  for (const Vec2& q : r.orbit) orbit.push_back(vec_json(q));
  j["orbit"] = orbit;
  return j;
}

Json branch_json(const ManifoldBranch& b) {
  Json j;
  j["kind"] = branch_kind_name(b.kind);
  j["side"] = branch_side_name(b.side);
  j["saddle"] = vec_json(b.saddle);
  j["direction"] = vec_json(b.direction);
  j["eigenvalue"] = b.eigenvalue;
  j["twisted"] = b.twisted;
  j["delta"] = b.delta;
  j["vertices"] = b.polyline.size();
  j["t_max"] = b.t_max();
  j["arclength"] = b.arclength;
  j["stop_reason"] = stop_reason_name(b.stop_reason);
  j["max_turn_angle"] = max_turn_angle(b);
  return j;
}

Json homoclinic_point_json(const HomoclinicPoint& h) {
  Json j;
  j["location"] = vec_json(h.location);
  j["t_u"] = h.t_u;
  j["t_s"] = h.t_s;
  j["transversal"] = h.transversal;
  j["overlap"] = h.overlap;
  j["crossing_sign"] = h.crossing_sign;
  j["sin_angle"] = h.sin_angle;
  return j;
}

Json cell_json(const HomoclinicCell& c) {
  Json j;
  j["saddle"] = vec_json(c.loop.p);
  j["p_prime"] = homoclinic_point_json(c.loop.p_prime);
  j["loop_reductions"] = c.loop.reductions;
  j["ju_vertices"] = c.loop.j_u.size();
  j["js_vertices"] = c.loop.j_s.size();
  j["polygon_vertices"] = c.polygon.vertices().size();
  j["sign"] = cell_sign_name(c.sign);
  j["rho"] = c.rho;
  j["area"] = c.area;
  Json probes = Json::array();
  for (const auto& p : c.probes) {
    Json q;
    q["radius"] = p.radius;
    q["quadrants_inside"] = Json::array({p.quadrant_inside[0], p.quadrant_inside[1], p.quadrant_inside[2],
                                         p.quadrant_inside[3]});
    q["verdict"] = p.verdict;
    probes.push_back(q);
  }
  j["sign_probes"] = probes;
  return j;
}

Json block_json(const BlockReport& b) {
  Json j;
  j["n"] = b.n;
  Json orbits = Json::array();
  for (const auto& o : b.orbits) orbits.push_back(fixed_point_json(o));
  j["orbits"] = orbits;
  Json pts = Json::array();
  for (const Vec2& q : b.points) pts.push_back(vec_json(q));
  j["points"] = pts;
  j["per_point_indices"] = b.per_point_indices;
  j["block_index"] = b.block_index ? Json(*b.block_index) : Json(nullptr);
  j["rho"] = b.rho;
  j["certifiable"] = b.certifiable;
  j["match"] = b.match;
  j["verdict"] = b.verdict;
  j["boundary_winding"] = b.boundary_winding ? Json(*b.boundary_winding) : Json(nullptr);
  j["cross_check"] = b.cross_check;
  Json d;
  d["seed_grid"] = b.grid;
  d["newton_runs"] = b.newton_runs;
  d["max_residual"] = b.max_residual;
  d["uncertain_count"] = b.uncertain_count;
  d["notes"] = b.diagnostics;
  j["diagnostics"] = d;
  return j;
}

Json a1_json(const TheoremA1Report& r) {
  Json j;
  j["r"] = r.r;
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    Json x;
    x["k"] = l.k;
    x["period"] = l.period;
    x["orbit_count"] = l.orbits.size();
    Json classes = Json::array();
    for (const auto& o : l.orbits) classes.push_back(class_name(o.cls));
    x["classifications"] = classes;
    x["attracting_or_repelling"] = l.attracting_or_repelling;
    x["twisted_saddle"] = l.twisted_saddle;
    x["non_hyperbolic"] = l.non_hyperbolic;
    x["uncertain_count"] = l.uncertain_count;
    levels.push_back(x);
  }
  j["levels"] = levels;
  j["hypothesis_holds"] = r.hypothesis_holds;
  j["alternative_a_k"] = r.alternative_a_k ? Json(*r.alternative_a_k) : Json(nullptr);
  j["alternative_b"] = r.alternative_b;
  j["verdict"] = r.verdict;
  j["search_complete"] = r.search_complete;
  return j;
}

Json total_index_json(const TotalIndexReport& r) {
  Json j;
  Json pts = Json::array();
  for (const auto& p : r.points) {
    Json q;
    q["chart"] = p.south_chart ? "south" : "north";
    q["location"] = vec_json(p.location);
    q["classification"] = class_name(p.cls);
    q["index"] = p.index;
    q["other_chart_index"] = p.other_chart_index ? Json(*p.other_chart_index) : Json(nullptr);
    pts.push_back(q);
  }
  j["fixed_points"] = pts;
  j["total_index"] = r.total;
  j["split_circle_degree"] = r.circle_degree;
  j["split_radius"] = r.split_radius;
  j["charts_agree"] = r.charts_agree;
  j["notes"] = r.diagnostics;
  return j;
}

Json components_json(const ComponentIndexReport& r) {
  Json j;
  j["cell_component_index"] = r.cell_index;
  j["outer_component_index"] = r.outer_index;
  j["saddle_index"] = r.saddle_index;
  j["outer_method"] = r.outer_method;
  j["is_one_two"] = r.is_one_two;
  j["sums_to_two"] = r.sums_to_two;
  return j;
}

Json lefschetz_json(const LefschetzReport& r) {
  Json j;
  j["fixed_points"] = r.fixed_points;
  j["lefschetz"] = r.lefschetz;
  j["rho"] = r.rho;
  j["bound"] = r.bound;
  j["weak_bound"] = r.weak_bound;
  j["satisfied"] = r.satisfied;
  j["weak_satisfied"] = r.weak_satisfied;
  j["in_closed_cell"] = r.in_closure;
  j["outside_closed_cell"] = r.outside;
  j["diagnostic"] = r.diagnostic;
  return j;
}

Json three_points_json(const ThreeFixedPointReport& r) {
  Json j;
  Json runs = Json::array();
  for (const auto& x : r.runs) {
    Json q;
    q["epsilon"] = x.epsilon;
    q["angle"] = x.angle;
    q["fixed_points"] = x.fixed_points;
    runs.push_back(q);
  }
  j["perturbations"] = runs;
  j["min_count"] = r.min_count;
  j["satisfied"] = r.satisfied;
  return j;
}

std::string branch_csv(const ManifoldBranch& b) {
  std::string out = "t,x,y\n";
  char buf[96];
  for (std::size_t i = 0; i < b.polyline.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", b.params[i], b.polyline[i].x, b.polyline[i].y);
    out += buf;
  }
  return out;
}

namespace {

struct Frame {
  Rect view;
  double width = 800.0, height = 800.0;
  Vec2 operator()(Vec2 p) const {
    return {(p.x - view.xmin) / view.width() * width, (view.ymax - p.y) / view.height() * height};
  }
};

// Pixel-space thinning: drop points closer than half a pixel to the last kept one.
std::string points_attr(const Frame& fr, const std::vector<Vec2>& pts) {
  std::string s;
  char buf[64];
  Vec2 last{1e300, 1e300};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 q = fr(pts[i]);
    if (i + 1 < pts.size() && distance(q, last) < 0.5) continue;
    std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", s.empty() ? "" : " ", q.x, q.y);
    s += buf;
    last = q;
  }
  return s;
}

}  // namespace

std::string render_portrait(const PortraitInput& in) {
  if (in.branches.empty() && !in.cell && in.fixed_points.empty())
    throw Error(ErrorCode::kInvalidArgument, "portrait has nothing to draw");
  if (!(in.view.width() > 0 && in.view.height() > 0)) throw Error(ErrorCode::kInvalidArgument, "empty view");
  Frame fr{in.view, 800.0, 800.0 * in.view.height() / in.view.width()};
  std::ostringstream o;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.2f %.2f\">\n",
                fr.width, fr.height, fr.width, fr.height);
  o << buf;
  o << "<style>.cell{fill:#f4d58d;fill-opacity:0.6;stroke:none}.wu{fill:none;stroke:#c0392b;stroke-width:1.2}"
       ".ws{fill:none;stroke:#2e86c1;stroke-width:1.2}.fp{stroke:#222;stroke-width:1}</style>\n";
  o << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (in.cell) o << "<polygon class=\"cell\" points=\"" << points_attr(fr, in.cell->polygon.vertices()) << "\"/>\n";
  for (const ManifoldBranch* b : in.branches) {
    o << "<polyline class=\"" << (b->kind == BranchKind::kUnstable ? "wu" : "ws") << "\" data-side=\""
      << branch_side_name(b->side) << "\" points=\"" << points_attr(fr, b->polyline) << "\"/>\n";
  }
  for (const auto& fp : in.fixed_points) {
    const Vec2 q = fr(fp.location);
    const char* cls = class_name(fp.cls);
    switch (fp.cls) {
      case FixedPointClass::kDirectSaddle:
      case FixedPointClass::kReflectingSaddle:
        std::snprintf(buf, sizeof buf, "<rect class=\"fp %s\" x=\"%.2f\" y=\"%.2f\" width=\"8\" height=\"8\" fill=\"#222\"/>\n",
                      cls, q.x - 4, q.y - 4);
        break;
      case FixedPointClass::kTwistedSaddle:
        std::snprintf(buf, sizeof buf,
                      "<polygon class=\"fp %s\" points=\"%.2f,%.2f %.2f,%.2f %.2f,%.2f %.2f,%.2f\" fill=\"#8e44ad\"/>\n",
                      cls, q.x, q.y - 5, q.x + 5, q.y, q.x, q.y + 5, q.x - 5, q.y);
        break;
      case FixedPointClass::kElliptic:
        std::snprintf(buf, sizeof buf, "<circle class=\"fp %s\" cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"white\"/>\n", cls,
                      q.x, q.y);
        break;
      case FixedPointClass::kSink:
      case FixedPointClass::kSource:
        std::snprintf(buf, sizeof buf, "<circle class=\"fp %s\" cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"%s\"/>\n", cls,
                      q.x, q.y, fp.cls == FixedPointClass::kSink ? "#27ae60" : "#e67e22");
        break;
      default:
        std::snprintf(buf, sizeof buf, "<circle class=\"fp %s\" cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"#999\"/>\n", cls,
                      q.x, q.y);
    }
    o << buf;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace homcell
