#include "homcell/homoclinic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "homcell/errors.hpp"

namespace homcell {

const char* cell_sign_name(CellSign s) { return s == CellSign::kPositive ? "positive" : "negative"; }

namespace {

struct Polished {
  Vec2 location;
  double t_u = 0.0;
  double t_s = 0.0;
};

double side_of(Vec2 a0, Vec2 a1, Vec2 x) { return cross(a1 - a0, x - a0); }

// Shrinks [lo, hi] by one bisection step towards the sign change of side(x(t)).
void bisect_once(const ManifoldBranch& b, double& lo, double& hi, Vec2& xlo, Vec2& xhi, Vec2 l0, Vec2 l1) {
  const double mid = 0.5 * (lo + hi);
  const Vec2 xm = exact_point(b, mid);
  const double clo = side_of(l0, l1, xlo), cm = side_of(l0, l1, xm), chi = side_of(l0, l1, xhi);
  bool left;
  if ((clo <= 0) != (cm <= 0)) left = true;
  else if ((cm <= 0) != (chi <= 0)) left = false;
  else left = std::abs(clo) < std::abs(chi);
  if (left) {
    hi = mid;
    xhi = xm;
  } else {
    lo = mid;
    xlo = xm;
  }
}

// Alternating bisection on exact branch points: each side is cut against the current chord
// of the other.
Polished polish_crossing(const ManifoldBranch& wu, const ManifoldBranch& ws, double ua, double ub, double sa,
                         double sb, double tol) {
  Vec2 a0 = exact_point(wu, ua), a1 = exact_point(wu, ub);
  Vec2 b0 = exact_point(ws, sa), b1 = exact_point(ws, sb);
  for (int it = 0; it < 400; ++it) {
    const bool u_done = distance(a0, a1) < tol || ub - ua <= 1e-15 * std::max(1.0, ub);
    const bool s_done = distance(b0, b1) < tol || sb - sa <= 1e-15 * std::max(1.0, sb);
    if (u_done && s_done) break;
    if (!u_done) bisect_once(wu, ua, ub, a0, a1, b0, b1);
    if (!s_done) bisect_once(ws, sa, sb, b0, b1, a0, a1);
  }
  Polished out;
  const Vec2 da = a1 - a0, db = b1 - b0;
  const double den = cross(da, db);
  double ta = 0.5, tb = 0.5;
  if (std::abs(den) > 1e-300) {
    ta = std::clamp(cross(b0 - a0, db) / den, 0.0, 1.0);
    tb = std::clamp(cross(b0 - a0, da) / den, 0.0, 1.0);
  }
  out.location = a0 + ta * da;
  out.t_u = ua + ta * (ub - ua);
  out.t_s = sa + tb * (sb - sa);
  return out;
}

// Golden-section search for the parameter in [lo, hi] maximising the distance to `p`.
double farthest_parameter(const ManifoldBranch& b, double lo, double hi, Vec2 p) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = distance(exact_point(b, x1), p), f2 = distance(exact_point(b, x2), p);
  for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = distance(exact_point(b, x1), p);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = distance(exact_point(b, x2), p);
    }
  }
  return 0.5 * (lo + hi);
}


struct ArcHit {
  std::size_t seg_u = 0;
  std::size_t seg_s = 0;
  SegmentHit hit;
};

// Crossings of the two open polylines other than touches at the shared endpoints.
std::vector<ArcHit> inner_crossings(const std::vector<Vec2>& ju, const std::vector<Vec2>& js, Vec2 p, Vec2 pp,
                                    double eps) {
  std::vector<ArcHit> out;
  if (ju.size() < 2 || js.size() < 2) return out;
  SegmentIndex index(js, false);
  for (std::size_t i = 0; i + 1 < ju.size(); ++i) {
    const Vec2 a0 = ju[i], a1 = ju[i + 1];
    const Rect box{std::min(a0.x, a1.x), std::max(a0.x, a1.x), std::min(a0.y, a1.y), std::max(a0.y, a1.y)};
    index.visit(box, [&](std::size_t j) {
      const auto [b0, b1] = index.segment(j);
      const auto h = intersect_segments(a0, a1, b0, b1);
      if (!h) return;
      if (distance(h->point, p) <= eps || distance(h->point, pp) <= eps) return;
      out.push_back({i, j, *h});
    });
  }
  std::sort(out.begin(), out.end(), [](const ArcHit& a, const ArcHit& b) {
    return a.seg_u != b.seg_u ? a.seg_u < b.seg_u : a.hit.ta < b.hit.ta;
  });
  return out;
}

// Arc from the saddle to t, with the parameter of every vertex.
void arc_with_params(const ManifoldBranch& b, double t, Vec2 endpoint, std::vector<Vec2>& pts,
                     std::vector<double>& params) {
  pts.clear();
  params.clear();
  for (std::size_t i = 0; i < b.params.size() && b.params[i] < t; ++i) {
    pts.push_back(b.polyline[i]);
    params.push_back(b.params[i]);
  }
  if (pts.empty()) {
    pts.push_back(b.saddle);
    params.push_back(0.0);
  }
  if (distance(pts.back(), endpoint) == 0.0 && pts.size() > 1) {
    pts.pop_back();
    params.pop_back();
  }
  pts.push_back(endpoint);
  params.push_back(t);
}

}  // namespace

std::vector<HomoclinicPoint> find_homoclinic_points(const ManifoldBranch& wu, const ManifoldBranch& ws,
                                                    const HomoclinicOptions& o) {
  if (wu.kind != BranchKind::kUnstable || ws.kind != BranchKind::kStable)
    throw Error(ErrorCode::kInvalidArgument, "expected an unstable and a stable branch");
  if (distance(wu.saddle, ws.saddle) > 1e-9)
    throw Error(ErrorCode::kInvalidArgument, "branches belong to different saddles");
  const Vec2 p = wu.saddle;
  const auto& U = wu.polyline;
  const auto& S = ws.polyline;
  std::vector<HomoclinicPoint> out;
  if (U.size() < 2 || S.size() < 2) return out;
  const SegmentIndex s_index(S, false);

  // Coincident stretches.
  std::vector<char> on(U.size(), 0);
  std::size_t outside = 0, on_count = 0;
  for (std::size_t i = 0; i < U.size(); ++i) {
    if (distance(U[i], p) <= o.exclusion_radius) continue;
    ++outside;
    if (s_index.nearest(U[i], o.overlap_tolerance) <= o.overlap_tolerance) {
      on[i] = 1;
      ++on_count;
    }
  }
  const bool overlap_rule = outside > 0 && static_cast<double>(on_count) >= o.overlap_min_fraction * outside;
  std::vector<char> in_run(U.size(), 0);
  if (overlap_rule) {
    std::size_t best_begin = 0, best_len = 0;
    for (std::size_t i = 0; i < U.size();) {
      if (!on[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < U.size() && on[j]) ++j;
      if (j - i >= 4) {
        for (std::size_t k = i; k < j; ++k) in_run[k] = 1;
        if (j - i > best_len) {
          best_len = j - i;
          best_begin = i;
        }
      }
      i = j;
    }
    if (best_len > 0) {
      std::size_t far_i = best_begin;
      for (std::size_t k = best_begin; k < best_begin + best_len; ++k)
        if (distance(U[k], p) > distance(U[far_i], p)) far_i = k;
      const double lo = wu.params[far_i > 0 ? far_i - 1 : 0];
      const double hi = wu.params[std::min(far_i + 1, U.size() - 1)];
      HomoclinicPoint hp;
      hp.t_u = farthest_parameter(wu, lo, hi, p);
      hp.location = exact_point(wu, hp.t_u);
      std::size_t seg = 0;
      double w = 0.0;
      s_index.nearest(hp.location, 10 * o.overlap_tolerance + 1e-9, &seg, &w);
      const double slo = ws.params[seg > 0 ? seg - 1 : 0];
      const double shi = ws.params[std::min(seg + 2, S.size() - 1)];
      hp.t_s = farthest_parameter(ws, slo, shi, p);
      hp.overlap = true;
      hp.transversal = false;
      hp.crossing_sign = 0;
      out.push_back(hp);
    }
  }

  // Transversal (and tangential) crossings.
  struct Raw {
    std::size_t i, j;
    SegmentHit hit;
  };
  std::vector<Raw> raws;
  for (std::size_t i = 0; i + 1 < U.size(); ++i) {
    if (in_run[i] || in_run[i + 1]) continue;
    const Vec2 a0 = U[i], a1 = U[i + 1];
    if (distance(a0, p) <= o.exclusion_radius && distance(a1, p) <= o.exclusion_radius) continue;
    const Rect box{std::min(a0.x, a1.x), std::max(a0.x, a1.x), std::min(a0.y, a1.y), std::max(a0.y, a1.y)};
    s_index.visit(box, [&](std::size_t j) {
      const auto [b0, b1] = s_index.segment(j);
      const auto h = intersect_segments(a0, a1, b0, b1);
      if (!h || distance(h->point, p) <= o.exclusion_radius) return;
      raws.push_back({i, j, *h});
    });
  }
  for (const Raw& r : raws) {
    HomoclinicPoint hp;
    const Polished pol = polish_crossing(wu, ws, wu.params[r.i], wu.params[r.i + 1], ws.params[r.j],
                                         ws.params[r.j + 1], o.polish_tolerance);
    hp.location = pol.location;
    hp.t_u = pol.t_u;
    hp.t_s = pol.t_s;
    hp.sin_angle = r.hit.sin_angle;
    hp.transversal = std::abs(r.hit.sin_angle) >= o.tangency_sin;
    hp.crossing_sign = hp.transversal ? (r.hit.sin_angle > 0 ? 1 : -1) : 0;
    bool dup = false;
    for (const auto& q : out) {
      if (distance(q.location, hp.location) < 1e-8 && std::abs(q.t_u - hp.t_u) < 1e-6) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(hp);
  }
  std::sort(out.begin(), out.end(), [](const HomoclinicPoint& a, const HomoclinicPoint& b) { return a.t_u < b.t_u; });
  return out;
}

std::vector<Vec2> branch_arc(const ManifoldBranch& branch, double t, std::optional<Vec2> endpoint) {
  std::vector<Vec2> pts;
  std::vector<double> params;
  arc_with_params(branch, t, endpoint ? *endpoint : exact_point(branch, t), pts, params);
  return pts;
}

HomoclinicLoop build_simple_loop(const HomoclinicPoint& p_prime, const ManifoldBranch& wu, const ManifoldBranch& ws,
                                 const HomoclinicOptions& o) {
  HomoclinicLoop loop;
  loop.p = wu.saddle;
  HomoclinicPoint cur = p_prime;
  for (int round = 0; round < 64; ++round) {
    if (distance(cur.location, loop.p) <= o.exclusion_radius)
      throw Error(ErrorCode::kDegenerateLoop, "homoclinic point lies inside the exclusion disk of the saddle");
    std::vector<Vec2> ju, js;
    std::vector<double> tu, ts;
    arc_with_params(wu, cur.t_u, cur.location, ju, tu);
    arc_with_params(ws, cur.t_s, cur.location, js, ts);
    std::reverse(js.begin(), js.end());
    std::reverse(ts.begin(), ts.end());
    const double eps = std::max(1e-10, 10 * o.polish_tolerance);
    const auto hits = inner_crossings(ju, js, loop.p, cur.location, eps);
    if (hits.empty()) {
      loop.p_prime = cur;
      loop.j_u = std::move(ju);
      loop.j_s = std::move(js);
      loop.simple = true;
      return loop;
    }
    const ArcHit& h = hits.front();
    // js is reversed: segment j runs from ts[j] down to ts[j + 1].
    const Polished pol = polish_crossing(wu, ws, tu[h.seg_u], tu[h.seg_u + 1], ts[h.seg_s + 1], ts[h.seg_s],
                                         o.polish_tolerance);
    HomoclinicPoint next;
    next.location = pol.location;
    next.t_u = pol.t_u;
    next.t_s = pol.t_s;
    next.sin_angle = -h.hit.sin_angle;  // js runs against W_s
    next.transversal = std::abs(next.sin_angle) >= o.tangency_sin;
    next.crossing_sign = next.transversal ? (next.sin_angle > 0 ? 1 : -1) : 0;
    if (!(next.t_u < cur.t_u)) throw Error(ErrorCode::kDegenerateLoop, "loop reduction did not shorten the arcs");
    cur = next;
    ++loop.reductions;
  }
  throw Error(ErrorCode::kDegenerateLoop, "too many loop reductions");
}

HomoclinicLoop loop_from_arcs(std::vector<Vec2> j_u, std::vector<Vec2> j_s) {
  if (j_u.size() < 2 || j_s.size() < 2) throw Error(ErrorCode::kInvalidArgument, "arcs need at least two points");
  if (distance(j_u.back(), j_s.front()) > 1e-12 || distance(j_s.back(), j_u.front()) > 1e-12)
    throw Error(ErrorCode::kInvalidArgument, "arcs must share their endpoints");
  HomoclinicLoop loop;
  loop.p = j_u.front();
  loop.p_prime.location = j_u.back();
  loop.simple = inner_crossings(j_u, j_s, loop.p, loop.p_prime.location, 1e-12).empty();
  loop.j_u = std::move(j_u);
  loop.j_s = std::move(j_s);
  return loop;
}

CellSign classify_cell_sign(const OrientedPolygon& polygon, Vec2 p, Vec2 u_dir, Vec2 s_dir, double max_radius,
                            std::vector<SignProbe>* probes) {
  const Vec2 u = normalized(u_dir), s = normalized(s_dir);
  if (std::abs(cross(u, s)) < 1e-8) throw Error(ErrorCode::kAmbiguousSign, "departing directions are parallel");
  std::vector<double> radii;
  for (double r : {1e-4, 1e-3, 1e-2})
    if (r <= max_radius) radii.push_back(r);
  if (radii.empty()) radii = {0.01 * max_radius, 0.1 * max_radius, max_radius};
  const PolygonLocator loc(polygon.vertices());
  std::optional<CellSign> verdict;
  std::ostringstream why;
  for (double r : radii) {
    SignProbe probe;
    probe.radius = r;
    for (int q = 0; q < 4; ++q) {
      const double th = (2 * q + 1) * kPi / 4;
      const Vec2 x = p + r * (std::cos(th) * u + std::sin(th) * s);
      probe.quadrant_inside[q] = loc.locate(x, 0.0) == PointLocation::kInside;
    }
    const auto& in = probe.quadrant_inside;
    std::optional<CellSign> v;
    if (in[0] && !in[1] && !in[2] && !in[3]) v = CellSign::kPositive;
    else if (!in[0] && in[1] && in[2] && in[3]) v = CellSign::kNegative;
    probe.verdict = v ? cell_sign_name(*v) : "ambiguous";
    if (probes) probes->push_back(probe);
    why << " r=" << r << ":" << in[0] << in[1] << in[2] << in[3];
    if (!v || (verdict && *verdict != *v)) throw Error(ErrorCode::kAmbiguousSign, "quadrant probes disagree:" + why.str());
    verdict = v;
  }
  return *verdict;
}

HomoclinicCell cell_from_loop(const HomoclinicLoop& loop, Vec2 u_dir, Vec2 s_dir) {
  if (!loop.simple) throw Error(ErrorCode::kDegenerateLoop, "loop is not simple");
  std::vector<Vec2> ring;
  ring.reserve(loop.j_u.size() + loop.j_s.size());
  auto push = [&](Vec2 x) {
    if (ring.empty() || distance(ring.back(), x) > 1e-14) ring.push_back(x);
  };
  for (const Vec2& x : loop.j_u) push(x);
  for (std::size_t i = 1; i + 1 < loop.j_s.size(); ++i) push(loop.j_s[i]);
  if (ring.size() < 3 || std::abs(signed_area(ring)) <= 1e-10)
    throw Error(ErrorCode::kDegenerateLoop, "loop encloses no area");
  std::optional<OrientedPolygon> poly;
  try {
    poly = OrientedPolygon::from_ring(std::move(ring)).counterclockwise();
  } catch (const Error& e) {
    throw Error(ErrorCode::kDegenerateLoop, std::string("loop is not a simple curve: ") + e.what());
  }
  std::vector<SignProbe> probes;
  const CellSign sign =
      classify_cell_sign(*poly, loop.p, u_dir, s_dir, 0.25 * distance(loop.p_prime.location, loop.p), &probes);
  auto locator = std::make_shared<const PolygonLocator>(poly->vertices());
  const double area = poly->area();
  return HomoclinicCell{loop, std::move(*poly), sign, rho_of(sign), area, std::move(probes), true, std::move(locator)};
}

PointLocation point_in_cell(const HomoclinicCell& cell, Vec2 x, double band) {
  if (cell.locator) return cell.locator->locate(x, band);
  return PolygonLocator(cell.polygon.vertices()).locate(x, band);
}

}  // namespace homcell
