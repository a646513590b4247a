#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace homcell {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }
constexpr Vec2 left_normal(Vec2 a) { return {-a.y, a.x}; }
constexpr bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

// Signed angle turning from a to b, in (-pi, pi].
inline double turn_angle(Vec2 a, Vec2 b) { return std::atan2(cross(a, b), dot(a, b)); }

// Row-major 2x2 matrix [[a11, a12], [a21, a22]].
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

constexpr Vec2 operator*(const Mat2& m, Vec2 v) {
  return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y};
}
constexpr Mat2 operator*(const Mat2& m, const Mat2& n) {
  return {m.a11 * n.a11 + m.a12 * n.a21, m.a11 * n.a12 + m.a12 * n.a22,
          m.a21 * n.a11 + m.a22 * n.a21, m.a21 * n.a12 + m.a22 * n.a22};
}
constexpr Mat2 operator-(const Mat2& m, const Mat2& n) {
  return {m.a11 - n.a11, m.a12 - n.a12, m.a21 - n.a21, m.a22 - n.a22};
}
constexpr double det(const Mat2& m) { return m.a11 * m.a22 - m.a12 * m.a21; }
constexpr double trace(const Mat2& m) { return m.a11 + m.a22; }
double max_abs(const Mat2& m);
std::optional<Mat2> inverse(const Mat2& m);

// Eigenvalues ordered by decreasing modulus (complex pairs: positive imaginary part first).
std::array<std::complex<double>, 2> eigenvalues(const Mat2& m);

// Unit eigenvector for a real eigenvalue; sign fixed so that x > 0 (or y > 0 when x ~ 0).
Vec2 eigenvector(const Mat2& m, double lambda);

struct Rect {
  double xmin = -10.0, xmax = 10.0, ymin = -10.0, ymax = 10.0;

  bool contains(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

Rect bounding_box(std::span<const Vec2> pts);

double signed_area(std::span<const Vec2> ring);
double polyline_length(std::span<const Vec2> pts);

// Distance from p to segment [a, b]; `param` receives the closest-point parameter in [0, 1].
double distance_to_segment(Vec2 p, Vec2 a, Vec2 b, double* param = nullptr);

struct SegmentHit {
  double ta = 0.0;  // parameter on the first segment
  double tb = 0.0;  // parameter on the second segment
  Vec2 point;
  double sin_angle = 0.0;  // signed sine of the angle from first to second direction
};

// Proper or touching intersection of [a0,a1] and [b0,b1]; nullopt for disjoint or collinear input.
std::optional<SegmentHit> intersect_segments(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

// Uniform-grid index over the segments of a polyline or closed ring.
class SegmentIndex {
 public:
  SegmentIndex() = default;
  SegmentIndex(std::span<const Vec2> pts, bool closed);

  std::size_t segment_count() const { return seg_count_; }
  std::pair<Vec2, Vec2> segment(std::size_t i) const;

  // Calls fn(i) once for every segment whose cell range meets the box.
  template <class Fn>
  void visit(const Rect& box, Fn&& fn) const;

  // Closest segment to p among those within `radius`; returns distance (or +inf).
  double nearest(Vec2 p, double radius, std::size_t* seg = nullptr, double* param = nullptr) const;

 private:
  void cell_range(const Rect& box, int& i0, int& i1, int& j0, int& j1) const;

  std::vector<Vec2> pts_;
  bool closed_ = false;
  std::size_t seg_count_ = 0;
  Rect box_;
  int nx_ = 1, ny_ = 1;
  double cw_ = 1.0, ch_ = 1.0;
  std::vector<std::uint32_t> cell_start_;
  std::vector<std::uint32_t> cell_items_;
};

enum class Orientation { kCounterclockwise, kClockwise };

// Simple closed polygon (closing edge implicit) with a declared orientation.
class OrientedPolygon {
 public:
  // Validates >= 3 vertices, simplicity and that the signed area matches `orientation`.
  OrientedPolygon(std::vector<Vec2> vertices, Orientation orientation);

  // Declares orientation from the signed area.
  static OrientedPolygon from_ring(std::vector<Vec2> vertices);
  // Skips the simplicity check (trusted construction, e.g. circles).
  static OrientedPolygon trusted(std::vector<Vec2> vertices, Orientation orientation);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  Orientation orientation() const { return orientation_; }
  double area() const { return std::abs(signed_area(vertices_)); }
  OrientedPolygon reversed() const;
  OrientedPolygon counterclockwise() const;

 private:
  OrientedPolygon() = default;
  std::vector<Vec2> vertices_;
  Orientation orientation_ = Orientation::kCounterclockwise;
};

OrientedPolygon circle_polygon(Vec2 center, double radius, int vertices = 64);

// True when no two non-adjacent edges of the closed ring intersect (touching within tol counts).
bool is_simple_ring(std::span<const Vec2> ring, double tol = 0.0);

enum class PointLocation { kInside, kOutside, kBoundary };

// Crossing-number point location against a fixed ring, indexed by horizontal slabs.
class PolygonLocator {
 public:
  PolygonLocator() = default;
  explicit PolygonLocator(std::span<const Vec2> ring);

  PointLocation locate(Vec2 p, double band) const;
  double distance_to_boundary(Vec2 p, double radius) const;
  const SegmentIndex& segments() const { return segments_; }

 private:
  std::vector<Vec2> ring_;
  double ymin_ = 0.0, ymax_ = 0.0, slab_h_ = 1.0;
  int slabs_ = 1;
  std::vector<std::vector<std::uint32_t>> slab_edges_;
  SegmentIndex segments_;
};

// Douglas-Peucker simplification of a closed ring; vertex 0 is always kept.
std::vector<Vec2> simplify_ring(std::span<const Vec2> ring, double tolerance);

// Offsets a counterclockwise simple ring by `distance` (positive shrinks, negative grows).
// Returns nullopt when the result is not simple or does not keep the requested clearance.
std::optional<std::vector<Vec2>> offset_ring(std::span<const Vec2> ccw_ring, double distance);

// ---------------------------------------------------------------------------

template <class Fn>
void SegmentIndex::visit(const Rect& box, Fn&& fn) const {
  if (seg_count_ == 0) return;
  if (box.xmax < box_.xmin || box.xmin > box_.xmax || box.ymax < box_.ymin || box.ymin > box_.ymax)
    return;
  int i0, i1, j0, j1;
  cell_range(box, i0, i1, j0, j1);
  std::vector<std::uint32_t> hits;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const std::size_t c = static_cast<std::size_t>(j) * nx_ + i;
      hits.insert(hits.end(), cell_items_.begin() + cell_start_[c],
                  cell_items_.begin() + cell_start_[c + 1]);
    }
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  for (std::uint32_t s : hits) fn(static_cast<std::size_t>(s));
}

}  // namespace homcell
