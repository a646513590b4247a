#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "homcell/geometry.hpp"

using namespace homcell;

namespace {

// Plain even-odd crossing test, no indexing.
bool brute_inside(const std::vector<Vec2>& ring, Vec2 p) {
  bool in = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const Vec2 a = ring[i], b = ring[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

std::vector<Vec2> star(int spikes, double r0, double r1) {
  std::vector<Vec2> v;
  for (int i = 0; i < 2 * spikes; ++i) {
    const double t = std::numbers::pi * i / spikes;
    const double r = i % 2 ? r0 : r1;
    v.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return v;
}

}  // namespace

TEST_CASE("signed area and orientation") {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(signed_area(sq) == doctest::Approx(1.0));
  const OrientedPolygon p(sq, Orientation::kCounterclockwise);
  CHECK(p.reversed().orientation() == Orientation::kClockwise);
  CHECK(p.reversed().counterclockwise().vertices().size() == 4);
  CHECK_THROWS_AS(OrientedPolygon(sq, Orientation::kClockwise), Error);
}

TEST_CASE("bow-tie ring is rejected") {
  const std::vector<Vec2> bow{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  CHECK_FALSE(is_simple_ring(bow));
  CHECK_THROWS_AS(OrientedPolygon::from_ring(bow), Error);
}

TEST_CASE("segment intersection") {
  auto h = intersect_segments({0, 0}, {2, 0}, {1, -1}, {1, 1});
  REQUIRE(h);
  CHECK(h->ta == doctest::Approx(0.5));
  CHECK(h->tb == doctest::Approx(0.5));
  CHECK(h->sin_angle == doctest::Approx(1.0));
  CHECK_FALSE(intersect_segments({0, 0}, {1, 0}, {0, 1}, {1, 1}));
  CHECK_FALSE(intersect_segments({0, 0}, {1, 0}, {2, 0}, {3, 0}));
}

TEST_CASE("polygon locator agrees with a brute-force crossing test") {
  const auto ring = star(7, 0.4, 1.0);
  const PolygonLocator loc(ring);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  int disagreements = 0;
  for (int i = 0; i < 20000; ++i) {
    const Vec2 p{u(rng), u(rng)};
    const auto where = loc.locate(p, 1e-12);
    if (where == PointLocation::kBoundary) continue;
    if ((where == PointLocation::kInside) != brute_inside(ring, p)) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("offset ring of a square") {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  auto in = offset_ring(sq, 0.1);
  REQUIRE(in);
  CHECK(std::abs(signed_area(*in)) == doctest::Approx(0.64).epsilon(1e-9));
  auto out = offset_ring(sq, -0.1);
  REQUIRE(out);
  CHECK(std::abs(signed_area(*out)) > 1.0);
  CHECK_FALSE(offset_ring(sq, 0.6));
}

TEST_CASE("eigenvalues are ordered by modulus") {
  const auto e = eigenvalues(Mat2{0.5, 0, 0, 2});
  CHECK(e[0].real() == doctest::Approx(2));
  CHECK(e[1].real() == doctest::Approx(0.5));
  const auto c = eigenvalues(Mat2{0, -1, 1, 0});
  CHECK(std::abs(c[0].imag()) == doctest::Approx(1));
  const Vec2 v = eigenvector(Mat2{2, 1, 0, 0.5}, 2.0);
  CHECK(v.x > 0);
  CHECK(norm(v) == doctest::Approx(1));
}

TEST_CASE("douglas-peucker keeps vertex 0 and the corners") {
  std::vector<Vec2> ring;
  for (int i = 0; i < 100; ++i) ring.push_back({i / 100.0, 0});
  for (int i = 0; i < 100; ++i) ring.push_back({1, i / 100.0});
  for (int i = 0; i < 100; ++i) ring.push_back({1 - i / 100.0, 1});
  for (int i = 0; i < 100; ++i) ring.push_back({0, 1 - i / 100.0});
  const auto s = simplify_ring(ring, 1e-9);
  CHECK(s.front().x == 0.0);
  CHECK(s.size() == 4);
}
