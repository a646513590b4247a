#include "doctest.h"
#include "fixtures.hpp"

using namespace homcell;
using fixtures::linear;

TEST_CASE("eigenvalue taxonomy") {
  using C = std::complex<double>;
  CHECK(classify_eigenvalues({C(2), C(0.5)}).cls == FixedPointClass::kDirectSaddle);
  CHECK(classify_eigenvalues({C(-2), C(-0.5)}).cls == FixedPointClass::kTwistedSaddle);
  CHECK(classify_eigenvalues({C(0.5), C(0.3)}).cls == FixedPointClass::kSink);
  CHECK(classify_eigenvalues({C(0.5, 0.5), C(0.5, -0.5)}).cls == FixedPointClass::kSink);
  CHECK(classify_eigenvalues({C(3), C(1.5)}).cls == FixedPointClass::kSource);
  CHECK(classify_eigenvalues({C(0.6, 0.8), C(0.6, -0.8)}).cls == FixedPointClass::kElliptic);
  CHECK(classify_eigenvalues({C(1), C(1)}).cls == FixedPointClass::kNonsimple);
  const auto b = classify_eigenvalues({C(1 + 1e-11), C(1 / (1 + 1e-11))});
  CHECK(b.borderline);
  CHECK(is_saddle(FixedPointClass::kTwistedSaddle));
  CHECK_FALSE(is_hyperbolic(FixedPointClass::kElliptic));
}

TEST_CASE("newton converges to the Henon fixed points") {
  const auto f = builtin_map("henon", {{"a", 1.4}, {"b", 0.3}});
  const auto r = newton_refine(f, 1, {0.6, 0.6});
  REQUIRE(r.converged);
  // x^2 + (1 + b) x - a = 0
  CHECK(r.point.x == doctest::Approx(0.7).epsilon(1e-12));
  const auto rec = make_record(f, 1, r.point);
  CHECK(rec.cls == FixedPointClass::kTwistedSaddle);
}

TEST_CASE("grid search finds both Henon fixed points, each once") {
  const auto f = builtin_map("henon", {{"a", 1.4}, {"b", 0.3}});
  SearchDiagnostics d;
  const auto pts = find_periodic_points(f, 1, Rect{-3, 2, -3, 2}, 60, {}, &d);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].location.x == doctest::Approx(-2.0));
  CHECK(pts[0].cls == FixedPointClass::kDirectSaddle);
  CHECK(pts[1].location.x == doctest::Approx(0.7));
  CHECK(d.max_residual < 1e-10);
}

TEST_CASE("period-2 orbit of the Henon map is reported once with minimal period 2") {
  const auto f = builtin_map("henon", {{"a", 1.4}, {"b", 0.3}});
  const auto pts = find_periodic_points(f, 2, Rect{-2.5, 2.5, -2.5, 2.5}, 80);
  int two = 0;
  for (const auto& r : pts) {
    if (r.minimal_period != 2) continue;
    ++two;
    REQUIRE(r.orbit.size() == 2);
    CHECK(distance(f.eval(r.orbit[0]), r.orbit[1]) < 1e-9);
    CHECK(distance(f.eval(r.orbit[1]), r.orbit[0]) < 1e-9);
  }
  CHECK(two == 1);
}

TEST_CASE("multiple shooting handles a strongly expanding orbit") {
  const auto f = builtin_map("area_preserving_henon", {{"alpha", 10.0}});
  FixedPointSearchOptions o;
  o.shooting_seeds = true;
  const auto pts = find_periodic_points(f, 4, Rect{-1.2, 1.2, -1.2, 1.2}, 120, o);
  int period4 = 0;
  for (const auto& r : pts) {
    if (r.minimal_period == 4) ++period4;
    CHECK(distance(f.iterate(r.location, 4), r.location) < 1e-8);
  }
  CHECK(period4 > 0);
}

TEST_CASE("linear maps: exact fixed point and classification") {
  const auto rec = make_record(linear(0.5, 0, 0, 2), 1, {0, 0});
  CHECK(rec.cls == FixedPointClass::kDirectSaddle);
  CHECK(rec.minimal_period == 1);
  CHECK(rec.residual == 0.0);
}
