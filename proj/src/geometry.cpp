#include "homcell/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "homcell/errors.hpp"

namespace homcell {

double max_abs(const Mat2& m) {
  return std::max({std::abs(m.a11), std::abs(m.a12), std::abs(m.a21), std::abs(m.a22)});
}

std::optional<Mat2> inverse(const Mat2& m) {
  const double d = det(m);
  const double scale = max_abs(m);
  if (d == 0.0 || std::abs(d) <= 1e-15 * scale * scale) return std::nullopt;
  return Mat2{m.a22 / d, -m.a12 / d, -m.a21 / d, m.a11 / d};
}

std::array<std::complex<double>, 2> eigenvalues(const Mat2& m) {
  const double half_tr = 0.5 * trace(m);
  const double d = det(m);
  const double disc = half_tr * half_tr - d;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double big = half_tr >= 0.0 ? half_tr + root : half_tr - root;
    const double small = big != 0.0 ? d / big : 0.0;
    if (std::abs(small) > std::abs(big)) return {std::complex<double>(small), std::complex<double>(big)};
    return {std::complex<double>(big), std::complex<double>(small)};
  }
  const double im = std::sqrt(-disc);
  return {std::complex<double>(half_tr, im), std::complex<double>(half_tr, -im)};
}

Vec2 eigenvector(const Mat2& m, double lambda) {
  const Vec2 r1{m.a11 - lambda, m.a12};
  const Vec2 r2{m.a21, m.a22 - lambda};
  const Vec2 row = norm(r1) >= norm(r2) ? r1 : r2;
  Vec2 v{1.0, 0.0};
  if (norm(row) > 0.0) v = normalized(Vec2{-row.y, row.x});
  if (v.x < -1e-14 || (std::abs(v.x) <= 1e-14 && v.y < 0.0)) v = -v;
  return v;
}

Rect bounding_box(std::span<const Vec2> pts) {
  Rect r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Vec2& p : pts) {
    r.xmin = std::min(r.xmin, p.x);
    r.xmax = std::max(r.xmax, p.x);
    r.ymin = std::min(r.ymin, p.y);
    r.ymax = std::max(r.ymax, p.y);
  }
  return r;
}

double signed_area(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  // Shoelace relative to the first vertex for better conditioning.
  double twice = 0.0;
  const Vec2 o = ring[0];
  for (std::size_t i = 1; i + 1 < n; ++i) twice += cross(ring[i] - o, ring[i + 1] - o);
  return 0.5 * twice;
}

double polyline_length(std::span<const Vec2> pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
  return len;
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b, double* param) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  if (param) *param = t;
  return distance(p, a + t * d);
}

std::optional<SegmentHit> intersect_segments(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const Vec2 d1 = a1 - a0;
  const Vec2 d2 = b1 - b0;
  const double l1 = norm(d1), l2 = norm(d2);
  if (l1 == 0.0 || l2 == 0.0) return std::nullopt;
  const double denom = cross(d1, d2);
  if (std::abs(denom) <= 1e-15 * l1 * l2) return std::nullopt;
  const Vec2 w = b0 - a0;
  const double ta = cross(w, d2) / denom;
  const double tb = cross(w, d1) / denom;
  if (ta < 0.0 || ta > 1.0 || tb < 0.0 || tb > 1.0) return std::nullopt;
  return SegmentHit{ta, tb, a0 + ta * d1, denom / (l1 * l2)};
}

// --- SegmentIndex ----------------------------------------------------------

SegmentIndex::SegmentIndex(std::span<const Vec2> pts, bool closed)
    : pts_(pts.begin(), pts.end()), closed_(closed) {
  const std::size_t n = pts_.size();
  seg_count_ = n < 2 ? 0 : (closed ? n : n - 1);
  if (seg_count_ == 0) return;
  box_ = bounding_box(pts_);
  const double pad = 1e-12 * (1.0 + std::max(box_.width(), box_.height()));
  box_.xmin -= pad; box_.xmax += pad; box_.ymin -= pad; box_.ymax += pad;
  const double w = box_.width(), h = box_.height();
  const double cells = std::clamp(static_cast<double>(seg_count_), 1.0, 1024.0 * 1024.0);
  const double aspect = w / h;
  nx_ = std::clamp(static_cast<int>(std::sqrt(cells * aspect)), 1, 1024);
  ny_ = std::clamp(static_cast<int>(std::sqrt(cells / aspect)), 1, 1024);
  cw_ = w / nx_;
  ch_ = h / ny_;

  std::vector<std::uint32_t> counts(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  auto for_cells = [&](std::size_t s, auto&& fn) {
    const auto [a, b] = segment(s);
    Rect r{std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y)};
    int i0, i1, j0, j1;
    cell_range(r, i0, i1, j0, j1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) fn(static_cast<std::size_t>(j) * nx_ + i);
  };
  for (std::size_t s = 0; s < seg_count_; ++s) for_cells(s, [&](std::size_t c) { ++counts[c + 1]; });
  for (std::size_t c = 1; c < counts.size(); ++c) counts[c] += counts[c - 1];
  cell_start_ = counts;
  cell_items_.resize(counts.back());
  std::vector<std::uint32_t> fill(counts.begin(), counts.end() - 1);
  for (std::size_t s = 0; s < seg_count_; ++s)
    for_cells(s, [&](std::size_t c) { cell_items_[fill[c]++] = static_cast<std::uint32_t>(s); });
}

std::pair<Vec2, Vec2> SegmentIndex::segment(std::size_t i) const {
  return {pts_[i], pts_[(i + 1) % pts_.size()]};
}

void SegmentIndex::cell_range(const Rect& box, int& i0, int& i1, int& j0, int& j1) const {
  auto cx = [&](double x) {
    return std::clamp(static_cast<int>(std::floor((x - box_.xmin) / cw_)), 0, nx_ - 1);
  };
  auto cy = [&](double y) {
    return std::clamp(static_cast<int>(std::floor((y - box_.ymin) / ch_)), 0, ny_ - 1);
  };
  i0 = cx(box.xmin); i1 = cx(box.xmax);
  j0 = cy(box.ymin); j1 = cy(box.ymax);
}

double SegmentIndex::nearest(Vec2 p, double radius, std::size_t* seg, double* param) const {
  double best = std::numeric_limits<double>::infinity();
  const Rect box{p.x - radius, p.x + radius, p.y - radius, p.y + radius};
  visit(box, [&](std::size_t s) {
    const auto [a, b] = segment(s);
    double t = 0.0;
    const double d = distance_to_segment(p, a, b, &t);
    if (d <= radius && d < best) {
      best = d;
      if (seg) *seg = s;
      if (param) *param = t;
    }
  });
  return best;
}

// --- OrientedPolygon -------------------------------------------------------

namespace {
Orientation orientation_of(std::span<const Vec2> ring) {
  return signed_area(ring) >= 0.0 ? Orientation::kCounterclockwise : Orientation::kClockwise;
}
}  // namespace

OrientedPolygon::OrientedPolygon(std::vector<Vec2> vertices, Orientation orientation)
    : vertices_(std::move(vertices)), orientation_(orientation) {
  if (vertices_.size() < 3) throw Error(ErrorCode::kInvalidArgument, "polygon needs at least 3 vertices");
  if (signed_area(vertices_) == 0.0)
    throw Error(ErrorCode::kInvalidArgument, "polygon has zero signed area");
  if (orientation_of(vertices_) != orientation_)
    throw Error(ErrorCode::kInvalidArgument, "polygon signed area does not match declared orientation");
  if (!is_simple_ring(vertices_))
    throw Error(ErrorCode::kInvalidArgument, "polygon is not simple");
}

OrientedPolygon OrientedPolygon::from_ring(std::vector<Vec2> vertices) {
  const Orientation o = orientation_of(vertices);
  return OrientedPolygon(std::move(vertices), o);
}

OrientedPolygon OrientedPolygon::trusted(std::vector<Vec2> vertices, Orientation orientation) {
  OrientedPolygon p;
  p.vertices_ = std::move(vertices);
  p.orientation_ = orientation;
  return p;
}

OrientedPolygon OrientedPolygon::reversed() const {
  OrientedPolygon p;
  p.vertices_.assign(vertices_.rbegin(), vertices_.rend());
  // keep the first vertex first
  std::rotate(p.vertices_.rbegin(), p.vertices_.rbegin() + 1, p.vertices_.rend());
  p.orientation_ = orientation_ == Orientation::kCounterclockwise ? Orientation::kClockwise
                                                                  : Orientation::kCounterclockwise;
  return p;
}

OrientedPolygon OrientedPolygon::counterclockwise() const {
  return orientation_ == Orientation::kCounterclockwise ? *this : reversed();
}

OrientedPolygon circle_polygon(Vec2 center, double radius, int vertices) {
  std::vector<Vec2> pts;
  pts.reserve(vertices);
  for (int i = 0; i < vertices; ++i) {
    const double a = 2.0 * kPi * i / vertices;
    pts.push_back(center + radius * Vec2{std::cos(a), std::sin(a)});
  }
  return OrientedPolygon::trusted(std::move(pts), Orientation::kCounterclockwise);
}

namespace {
double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  if (intersect_segments(a0, a1, b0, b1)) return 0.0;
  return std::min({distance_to_segment(a0, b0, b1), distance_to_segment(a1, b0, b1),
                   distance_to_segment(b0, a0, a1), distance_to_segment(b1, a0, a1)});
}
}  // namespace

bool is_simple_ring(std::span<const Vec2> ring, double tol) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  SegmentIndex index(ring, true);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [a, b] = index.segment(i);
    const Rect box{std::min(a.x, b.x) - tol, std::max(a.x, b.x) + tol, std::min(a.y, b.y) - tol,
                   std::max(a.y, b.y) + tol};
    bool ok = true;
    index.visit(box, [&](std::size_t j) {
      if (!ok || j <= i) return;
      if (j == i + 1 || (i == 0 && j == n - 1)) return;
      const auto [c, d] = index.segment(j);
      if (tol > 0.0 ? segment_distance(a, b, c, d) <= tol : intersect_segments(a, b, c, d).has_value())
        ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

// --- PolygonLocator --------------------------------------------------------

PolygonLocator::PolygonLocator(std::span<const Vec2> ring)
    : ring_(ring.begin(), ring.end()), segments_(ring, true) {
  const std::size_t n = ring_.size();
  if (n < 3) throw Error(ErrorCode::kInvalidArgument, "locator needs a ring with >= 3 vertices");
  const Rect box = bounding_box(ring_);
  ymin_ = box.ymin;
  ymax_ = box.ymax;
  slabs_ = static_cast<int>(std::clamp<std::size_t>(n / 4, 1, 4096));
  slab_h_ = (ymax_ - ymin_) / slabs_;
  if (slab_h_ <= 0.0) slab_h_ = 1.0;
  slab_edges_.assign(slabs_, {});
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring_[i], b = ring_[(i + 1) % n];
    const int s0 = std::clamp(static_cast<int>(std::floor((std::min(a.y, b.y) - ymin_) / slab_h_)), 0, slabs_ - 1);
    const int s1 = std::clamp(static_cast<int>(std::floor((std::max(a.y, b.y) - ymin_) / slab_h_)), 0, slabs_ - 1);
    for (int s = s0; s <= s1; ++s) slab_edges_[s].push_back(static_cast<std::uint32_t>(i));
  }
}

PointLocation PolygonLocator::locate(Vec2 p, double band) const {
  if (p.y < ymin_ - band || p.y > ymax_ + band) return PointLocation::kOutside;
  if (band > 0.0 && segments_.nearest(p, band) <= band) return PointLocation::kBoundary;
  if (p.y < ymin_ || p.y > ymax_) return PointLocation::kOutside;
  const int s = std::clamp(static_cast<int>(std::floor((p.y - ymin_) / slab_h_)), 0, slabs_ - 1);
  const std::size_t n = ring_.size();
  bool inside = false;
  for (std::uint32_t i : slab_edges_[s]) {
    const Vec2 a = ring_[i], b = ring_[(i + 1) % n];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (x > p.x) inside = !inside;
    }
  }
  return inside ? PointLocation::kInside : PointLocation::kOutside;
}

double PolygonLocator::distance_to_boundary(Vec2 p, double radius) const {
  return segments_.nearest(p, radius);
}

// --- simplification and offsets --------------------------------------------

std::vector<Vec2> simplify_ring(std::span<const Vec2> ring, double tolerance) {
  const std::size_t n = ring.size();
  if (n <= 4) return {ring.begin(), ring.end()};
  std::size_t far = 1;
  double far_d = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = distance(ring[0], ring[i]);
    if (d > far_d) { far_d = d; far = i; }
  }
  std::vector<char> keep(n + 1, 0);
  keep[0] = keep[far] = keep[n] = 1;
  auto at = [&](std::size_t i) { return ring[i % n]; };
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, far}, {far, n}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi <= lo + 1) continue;
    double worst = -1.0;
    std::size_t idx = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = distance_to_segment(at(i), at(lo), at(hi));
      if (d > worst) { worst = d; idx = i; }
    }
    if (worst > tolerance) {
      keep[idx] = 1;
      stack.emplace_back(lo, idx);
      stack.emplace_back(idx, hi);
    }
  }
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.push_back(ring[i]);
  return out;
}

std::optional<std::vector<Vec2>> offset_ring(std::span<const Vec2> ccw_ring, double d) {
  if (ccw_ring.size() < 3 || signed_area(ccw_ring) <= 0.0) return std::nullopt;
  const std::vector<Vec2> ring = simplify_ring(ccw_ring, 0.05 * std::abs(d));
  const std::size_t n = ring.size();
  if (n < 3) return std::nullopt;
  std::vector<Vec2> dir(n), nrm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = ring[(i + 1) % n] - ring[i];
    if (norm(e) == 0.0) return std::nullopt;
    dir[i] = normalized(e);
    nrm[i] = left_normal(dir[i]);
  }
  std::vector<Vec2> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const double s = cross(dir[prev], dir[i]);
    Vec2 v;
    if (std::abs(s) < 1e-6) {
      const Vec2 avg = nrm[prev] + nrm[i];
      v = ring[i] + d * normalized(avg);
    } else {
      const double a = d * cross(nrm[i] - nrm[prev], dir[i]) / s;
      v = ring[i] + d * nrm[prev] + a * dir[prev];
    }
    if (distance(v, ring[i]) > 50.0 * std::abs(d)) return std::nullopt;
    out.push_back(v);
  }
  // an edge that flips direction means the offset swallowed it
  for (std::size_t i = 0; i < n; ++i)
    if (dot(out[(i + 1) % n] - out[i], dir[i]) <= 0.0) return std::nullopt;
  if (signed_area(out) <= 0.0 || !is_simple_ring(out)) return std::nullopt;
  // Clearance against the original ring.
  PolygonLocator original(ccw_ring);
  const PointLocation wanted = d > 0.0 ? PointLocation::kInside : PointLocation::kOutside;
  for (const Vec2& v : out) {
    if (original.locate(v, 0.0) != wanted) return std::nullopt;
    if (original.distance_to_boundary(v, 0.5 * std::abs(d)) < 0.5 * std::abs(d)) return std::nullopt;
  }
  return out;
}

}  // namespace homcell
